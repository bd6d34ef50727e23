#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "draftlmt/dataset.hpp"

namespace draftlmt {

// Numeric schema x0, x1, ... for generated test problems.
FeatureSchema numeric_schema(std::size_t width);

// x ~ N(0, I); P(y = 1) = logistic(intercept + w . x).
Dataset linear_logistic_data(std::size_t n, const std::vector<double>& weights, double intercept,
                             std::uint64_t seed);

// x0 ~ U(0, 10), x1 and the `extra` further columns ~ N(0, 1).
// P(y = 1) = logistic(2 x1) when x0 < 5 and logistic(-2 x1) otherwise.
Dataset two_regime_data(std::size_t n, std::uint64_t seed, std::size_t extra = 1);

// Labels independent of x ~ N(0, I), P(y = 1) = 1/2.
Dataset noise_data(std::size_t n, std::size_t width, std::uint64_t seed);

// Draft-like records for the bundled fixture: a handful of goalies, some
// unranked prospects, non-CAN/USA nationalities and split-season entries.
// Players ranked inside the top 60 by the scouting service follow one
// logistic law driven by regular-season points, the rest another driven by
// plus-minus (negatively) and size.
std::vector<RawRow> synthetic_draft_rows(const std::vector<int>& years, std::size_t per_year,
                                         std::uint64_t seed);

// CSV with the default column names, in record order.
std::string to_csv(const std::vector<RawRow>& rows);

}  // namespace draftlmt
