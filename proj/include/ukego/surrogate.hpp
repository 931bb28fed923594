#pragma once

// Surrogate variants by id and a single entry point to build one on a design.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ukego/design.hpp"
#include "ukego/errors.hpp"
#include "ukego/hyperopt.hpp"
#include "ukego/poly_basis.hpp"
#include "ukego/trend_select.hpp"

namespace ukego {

enum class SurrogateKind { OK, UK1, UK2, BK, PckTotalOrder, PckTwoFactor, PckTensor, UK1Freq };

inline constexpr SurrogateKind kAllSurrogateKinds[] = {
    SurrogateKind::OK,           SurrogateKind::UK1,          SurrogateKind::UK2,
    SurrogateKind::BK,           SurrogateKind::PckTotalOrder, SurrogateKind::PckTwoFactor,
    SurrogateKind::PckTensor,    SurrogateKind::UK1Freq};

inline const char* to_string(SurrogateKind k) {
    switch (k) {
        case SurrogateKind::OK: return "ok";
        case SurrogateKind::UK1: return "uk1";
        case SurrogateKind::UK2: return "uk2";
        case SurrogateKind::BK: return "bk";
        case SurrogateKind::PckTotalOrder: return "pck-to";
        case SurrogateKind::PckTwoFactor: return "pck-tf";
        case SurrogateKind::PckTensor: return "pck-tensor";
        case SurrogateKind::UK1Freq: return "uk1-freq";
    }
    return "?";
}

inline std::optional<SurrogateKind> parse_surrogate_kind(std::string_view s) {
    for (SurrogateKind k : kAllSurrogateKinds)
        if (s == to_string(k)) return k;
    return std::nullopt;
}

/// True for kinds that scan a range of orders 0..p_max.
inline bool uses_p_range(SurrogateKind k) {
    return k == SurrogateKind::BK || k == SurrogateKind::PckTotalOrder ||
           k == SurrogateKind::PckTwoFactor || k == SurrogateKind::PckTensor;
}

/// Fixed trend order of the non-scanning kinds.
inline int fixed_order(SurrogateKind k) {
    switch (k) {
        case SurrogateKind::UK1:
        case SurrogateKind::UK1Freq: return 1;
        case SurrogateKind::UK2: return 2;
        default: return 0;
    }
}

struct SurrogateConfig {
    SurrogateKind kind = SurrogateKind::OK;
    int p_max = 2;
    TuneStrategy tune;
};

/// Smallest design size a kind needs in m dimensions (fixed trends only).
inline void check_surrogate_feasible(SurrogateKind kind, std::size_t m, Eigen::Index n) {
    const int p = fixed_order(kind);
    if (p == 0) return;
    const std::size_t P = generate_index_set(m, p, IndexScheme::TotalOrder).size();
    const bool strict = kind == SurrogateKind::UK1Freq;
    if (static_cast<Eigen::Index>(P) > n || (strict && static_cast<Eigen::Index>(P) >= n))
        throw PreconditionError(std::string(to_string(kind)) + ": polynomial size (" +
                                std::to_string(P) + ") exceeds the sample size (" +
                                std::to_string(n) + ")");
}

inline std::vector<int> p_range_up_to(int p_max) {
    std::vector<int> r;
    for (int p = 0; p <= p_max; ++p) r.push_back(p);
    return r;
}

inline SurrogateResult build_surrogate(const ExperimentalDesign& design, const SurrogateConfig& cfg,
                                       std::uint64_t seed) {
    switch (cfg.kind) {
        case SurrogateKind::OK: return build_uk_fixed(design, 0, cfg.tune, seed);
        case SurrogateKind::UK1: return build_uk_fixed(design, 1, cfg.tune, seed);
        case SurrogateKind::UK2: return build_uk_fixed(design, 2, cfg.tune, seed);
        case SurrogateKind::UK1Freq: return build_uk_frequentist(design, 1, cfg.tune, seed);
        case SurrogateKind::BK: return build_bk(design, p_range_up_to(cfg.p_max), cfg.tune, seed);
        case SurrogateKind::PckTotalOrder:
            return build_pck(design, p_range_up_to(cfg.p_max), IndexScheme::TotalOrder, cfg.tune, seed);
        case SurrogateKind::PckTwoFactor:
            return build_pck(design, p_range_up_to(cfg.p_max), IndexScheme::TwoFactor, cfg.tune, seed);
        case SurrogateKind::PckTensor:
            return build_pck(design, p_range_up_to(cfg.p_max), IndexScheme::TensorProduct, cfg.tune, seed);
    }
    throw PreconditionError("unknown surrogate kind");
}

}  // namespace ukego
