#pragma once

#include <string>

#include "dimred/error.hpp"

namespace dimred {

enum class Method { none, pca, kpca, lpp, lle, lda, kda, lsda };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::none: return "none";
    case Method::pca: return "pca";
    case Method::kpca: return "kpca";
    case Method::lpp: return "lpp";
    case Method::lle: return "lle";
    case Method::lda: return "lda";
    case Method::kda: return "kda";
    case Method::lsda: return "lsda";
  }
  return "none";
}

inline Method method_from_string(const std::string& name) {
  if (name == "none") return Method::none;
  if (name == "pca") return Method::pca;
  if (name == "kpca") return Method::kpca;
  if (name == "lpp") return Method::lpp;
  if (name == "lle") return Method::lle;
  if (name == "lda") return Method::lda;
  if (name == "kda") return Method::kda;
  if (name == "lsda") return Method::lsda;
  fail(Err::ConfigError, "unknown method '" + name + "'");
}

inline bool is_supervised(Method m) {
  return m == Method::lda || m == Method::kda || m == Method::lsda;
}

inline bool is_kernel_method(Method m) { return m == Method::kpca || m == Method::kda; }

}  // namespace dimred
