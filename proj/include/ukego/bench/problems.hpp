#pragma once

// Benchmark problem registry: bounds, budgets and known optima.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ukego/bench/test_functions.hpp"
#include "ukego/design.hpp"
#include "ukego/poly_basis.hpp"

namespace ukego::bench {

struct Problem {
    std::string name;
    std::size_t m = 0;
    BoxBounds raw_bounds;
    std::function<double(std::span<const double>)> objective;
    std::function<double(double)> transform;  // empty: optimize the raw value
    double known_optimum = 0.0;               // raw units
    int n_init = 0;
    int n_upd = 0;
    int p_max = 2;
    IndexScheme pck_scheme = IndexScheme::TotalOrder;

    double model_value(double raw) const { return transform ? transform(raw) : raw; }
};

inline Problem make_branin() {
    return {"branin", 2, BoxBounds(2, Bounds{0.0, 1.0}), branin, {}, 0.39788, 20, 10, 4,
            IndexScheme::TensorProduct};
}
inline Problem make_sasena() {
    return {"sasena", 2, BoxBounds(2, Bounds{0.0, 5.0}), sasena, {}, -1.4565, 20, 20, 4,
            IndexScheme::TensorProduct};
}
inline Problem make_hosaki() {
    return {"hosaki", 2, BoxBounds(2, Bounds{0.0, 5.0}), hosaki, {}, -2.3458, 12, 10, 4,
            IndexScheme::TensorProduct};
}
inline Problem make_hartman6() {
    return {"hartman6", 6, BoxBounds(6, Bounds{0.0, 1.0}), hartman6, log_transform_negative,
            -3.32237, 60, 25, 3, IndexScheme::TotalOrder};
}
inline Problem make_borehole() {
    BoxBounds b;
    for (std::size_t j = 0; j < 8; ++j) b.push_back({kBoreholeLower[j], kBoreholeUpper[j]});
    return {"borehole", 8, b, borehole, {}, 7.8198, 40, 10, 2, IndexScheme::TotalOrder};
}

inline const std::vector<std::string>& problem_names() {
    static const std::vector<std::string> names{"branin", "sasena", "hosaki", "hartman6", "borehole"};
    return names;
}

inline std::optional<Problem> find_problem(std::string_view name) {
    if (name == "branin") return make_branin();
    if (name == "sasena") return make_sasena();
    if (name == "hosaki") return make_hosaki();
    if (name == "hartman6" || name == "hartman-6") return make_hartman6();
    if (name == "borehole") return make_borehole();
    return std::nullopt;
}

}  // namespace ukego::bench
