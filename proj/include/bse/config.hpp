#pragma once

// Text formats for populations, schedule segments and schedule files.
//
//   population:  TYPE:COUNT[,TYPE:COUNT...]          e.g. GVWY:4,ZIP:12
//   segments:    FROM:TO:LO:HI[:OFFSET[:P1[:P2]]][,...]
//                OFFSET is none | linear:SLOPE | sine:AMPLITUDE:PERIOD | randomwalk:SEED
//   schedule file (JSON):
//     { "interval": 30, "timemode": "periodic", "stepmode": "fixed",
//       "demand": [ {"from": 0, "to": 60, "lo": 50, "hi": 150, "offset": "none"}, ... ],
//       "supply": [ ... ] }
//     "offset" may also be an object: {"name": "linear", "slope": 1},
//     {"name": "sine", "amplitude": 20, "period": 60}, {"name": "randomwalk", "seed": 7},
//     {"name": "table", "knots": [[0, 0], [30, 15]]}.

#include <filesystem>
#include <string_view>
#include <utility>
#include <vector>

#include "bse/order_flow.hpp"
#include "bse/session.hpp"

namespace bse {

std::vector<std::pair<TraderType, std::size_t>> parse_trader_counts(std::string_view text);
std::vector<TraderType> parse_trader_types(std::string_view text);
std::vector<ScheduleSegment> parse_segments(std::string_view text);

OrderSchedule schedule_from_json(std::string_view json_text);
OrderSchedule load_schedule_file(const std::filesystem::path& path);

}  // namespace bse
