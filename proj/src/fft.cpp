#include "fnls/field.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace fnls {

namespace {

// One forward/backward plan pair per grid shape. Plans are created with
// FFTW_ESTIMATE | FFTW_UNALIGNED so they can be executed on any buffer via
// the new-array interface; results are then deterministic across runs.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

class PlanCache {
public:
  static PlanCache& instance() {
    static PlanCache c;
    return c;
  }

  PlanPair& get(const std::vector<int>& dims) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(dims);
    if (it != plans_.end()) return it->second;

    std::size_t total = 1;
    for (int n : dims) total *= static_cast<std::size_t>(n);
    std::vector<std::complex<double>> buf(total);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    PlanPair pair;
    pair.fwd = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), p, p,
                             FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    pair.bwd = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), p, p,
                             FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!pair.fwd || !pair.bwd) throw std::runtime_error("fft: plan creation failed");
    return plans_.emplace(dims, pair).first->second;
  }

private:
  std::mutex mu_;
  std::map<std::vector<int>, PlanPair> plans_;
};

std::vector<int> dims_of(const Grid& g) {
  std::vector<int> d(g.dim());
  for (int a = 0; a < g.dim(); ++a) d[a] = g.n(a);
  return d;
}

} // namespace

void to_frequency(Field& f) {
  if (f.space == Space::Frequency) return;
  auto& pair = PlanCache::instance().get(dims_of(*f.grid));
  auto* p = reinterpret_cast<fftw_complex*>(f.v.data());
  fftw_execute_dft(pair.fwd, p, p);
  f.space = Space::Frequency;
}

void to_physical(Field& f) {
  if (f.space == Space::Physical) return;
  auto& pair = PlanCache::instance().get(dims_of(*f.grid));
  auto* p = reinterpret_cast<fftw_complex*>(f.v.data());
  fftw_execute_dft(pair.bwd, p, p);
  f.v *= 1.0 / static_cast<double>(f.grid->size());
  f.space = Space::Physical;
}

Field in_frequency(const Field& f) {
  Field out = f;
  to_frequency(out);
  return out;
}

Field in_physical(const Field& f) {
  Field out = f;
  to_physical(out);
  return out;
}

} // namespace fnls
