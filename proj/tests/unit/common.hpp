#pragma once

#include "chainform/link_model.hpp"
#include "chainform/standards.hpp"

#include <doctest.h>

namespace testutil {

using namespace chainform;

inline Calibration bench(int N = 3)
{
    auto c = default_calibration();
    c.params.n_inputs = N;
    return c;
}

inline const Problem& bench_problem()
{
    static const Problem pr = make_problem(bench());
    return pr;
}

inline double mean(const std::vector<double>& v)
{
    double a = 0;
    for (double x : v) a += x;
    return a / double(v.size());
}

} // namespace testutil
