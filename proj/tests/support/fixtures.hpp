#pragma once

#include "draftlmt/dataset.hpp"
#include "draftlmt/synthetic.hpp"

// Generated draft records as the loader sees them (goalies dropped, wing
// positions normalised).
inline std::vector<draftlmt::RawRow> fixture_rows(const std::vector<int>& years, std::size_t per_year,
                                                  std::uint64_t seed) {
  return draftlmt::parse_csv(draftlmt::to_csv(draftlmt::synthetic_draft_rows(years, per_year, seed)),
                             draftlmt::ColumnMap::defaults());
}
