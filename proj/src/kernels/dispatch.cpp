#include <cstdlib>
#include <stdexcept>
#include <string>

#include "rbd/kernels/api.hpp"

namespace rbd::kernels {

const Kernels* avx2_kernels();  // nullptr when not compiled in

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Kernels& select_active() {
  const char* force = std::getenv("RBD_KERNELS");
  if (force != nullptr) {
    const std::string want(force);
    if (want == "scalar") return scalar();
    if (want == "avx2" && backend_available(Backend::Avx2)) {
      return *avx2_kernels();
    }
    // Unknown or unavailable request falls through to auto-selection.
  }
  if (backend_available(Backend::Avx2)) return *avx2_kernels();
  return scalar();
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
      return avx2_kernels() != nullptr && cpu_has_avx2();
  }
  return false;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> v{Backend::Scalar};
  if (backend_available(Backend::Avx2)) v.push_back(Backend::Avx2);
  return v;
}

const Kernels& get(Backend b) {
  if (!backend_available(b)) {
    throw std::invalid_argument(std::string("kernel backend unavailable: ") +
                                backend_name(b));
  }
  return b == Backend::Scalar ? scalar() : *avx2_kernels();
}

const Kernels& active() {
  static const Kernels& k = select_active();
  return k;
}

}  // namespace rbd::kernels
