#include <cmath>
#include <iomanip>
#include <ostream>

#include "bistatic/sweep.hpp"

namespace bistatic {

namespace {

void write_number(std::ostream& out, double v) {
  if (std::isnan(v)) {
    out << "nan";
  } else {
    out << v;
  }
}

}  // namespace

void write_map_csv(const MapResult& map, std::ostream& out) {
  const auto old_flags = out.flags();
  const auto old_precision = out.precision(17);
  out << "x,y,peb,power_share,rank1,role_flag,status\n";
  for (const CellResult& c : map.cells) {
    write_number(out, c.x);
    out << ',';
    write_number(out, c.y);
    out << ',';
    write_number(out, c.peb);
    out << ',';
    write_number(out, c.power_share);
    out << ',' << (c.status == CellStatus::Ok ? (c.rank1_optimal ? "1" : "0") : "") << ',' << to_string(c.role) << ','
        << to_string(c.status) << '\n';
  }
  out.precision(old_precision);
  out.flags(old_flags);
}

}  // namespace bistatic
