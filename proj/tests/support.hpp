#pragma once

#include "safesmc/config.hpp"
#include "safesmc/model.hpp"

#include <initializer_list>

namespace testing {

inline safesmc::Vector vec(std::initializer_list<double> values) {
    safesmc::Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

inline safesmc::BuiltScenario demo(const std::string& name) { return safesmc::build(safesmc::demo_config(name)); }

// Section V robot with the paper's parameters.
inline safesmc::Scenario section_v() { return demo("robot-s1a").scenario; }

}  // namespace testing
