#include <belltest/dataset.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include <belltest/errors.hpp>

namespace belltest {

namespace {

constexpr double kAngleTol = 1e-9;  // radians, for modulo-pi comparisons

void validate_points(const std::vector<DataPoint>& pts) {
  if (pts.size() < 3) {
    throw ValidationError("fewer than 3 points");
  }
  for (const auto& p : pts) {
    if (!(p.rate >= 0.0)) throw ValidationError("negative rate");
    if (!(p.sigma >= 0.0)) throw ValidationError("negative sigma");
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (same_polarization(pts[i].angle, pts[j].angle, kAngleTol)) {
        std::ostringstream os;
        os << "duplicate angle modulo 180 degrees: " << pts[i].angle.degrees()
           << " and " << pts[j].angle.degrees();
        throw ValidationError(os.str());
      }
    }
  }
}

double parse_field(const std::string& field, long line) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
  double out = 0.0;
  auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ParseError("not a number: '" + field + "'", line);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

CoincidenceDataset::CoincidenceDataset(std::vector<DataPoint> points,
                                       std::string label)
    : points_(std::move(points)), label_(std::move(label)) {
  validate_points(points_);
}

bool CoincidenceDataset::is_uniform_grid(std::size_t* n_out) const {
  const std::size_t n = points_.size();
  std::vector<double> c;
  c.reserve(n);
  for (const auto& p : points_) c.push_back(p.angle.canonical().radians());
  std::sort(c.begin(), c.end());
  const double step = std::numbers::pi / static_cast<double>(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::fabs(c[i + 1] - c[i] - step) > kAngleTol) return false;
  }
  // wrap-around gap closes the circle
  if (std::fabs(c.front() + std::numbers::pi - c.back() - step) > kAngleTol) {
    return false;
  }
  if (n_out) *n_out = n;
  return true;
}

CoincidenceDataset CoincidenceDataset::scaled(double s) const {
  std::vector<DataPoint> pts = points_;
  for (auto& p : pts) {
    p.rate *= s;
    p.sigma *= s;
  }
  return CoincidenceDataset(std::move(pts), label_);
}

CoincidenceDataset load_dataset(std::istream& in, std::string label) {
  std::string line;
  long line_no = 0;

  auto next_line = [&](std::string& out) {
    if (!std::getline(in, out)) return false;
    ++line_no;
    if (!out.empty() && out.back() == '\r') out.pop_back();
    return true;
  };

  if (!next_line(line)) throw ParseError("empty input", 1);
  {
    std::string h = line;
    h.erase(std::remove_if(h.begin(), h.end(),
                           [](char ch) { return ch == ' ' || ch == '\t'; }),
            h.end());
    if (h != "angle_deg,rate,sigma") {
      throw ParseError("expected header 'angle_deg,rate,sigma'", line_no);
    }
  }

  std::vector<DataPoint> pts;
  while (next_line(line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    fields.push_back(cur);
    if (fields.size() != 3) {
      throw ParseError("expected 3 comma-separated fields", line_no);
    }
    DataPoint p;
    p.angle = Angle::from_degrees(parse_field(fields[0], line_no));
    p.rate = parse_field(fields[1], line_no);
    p.sigma = parse_field(fields[2], line_no);
    pts.push_back(p);
  }
  return CoincidenceDataset(std::move(pts), std::move(label));
}

void write_csv(const CoincidenceDataset& d, std::ostream& out) {
  out << "angle_deg,rate,sigma\n";
  for (const auto& p : d.points()) {
    out << format_double(p.angle.degrees()) << ',' << format_double(p.rate)
        << ',' << format_double(p.sigma) << '\n';
  }
}

std::string to_csv(const CoincidenceDataset& d) {
  std::ostringstream os;
  write_csv(d, os);
  return os.str();
}

CoincidenceDataset builtin_reference_dataset() {
  const double table[8][3] = {
      {0.0, 9906.2, 21.0},    {22.5, 8439.6, 18.6}, {45.0, 4936.6, 13.6},
      {67.5, 1454.1, 9.0},    {90.0, 108.0, 8.2},   {112.5, 1481.3, 11.9},
      {135.0, 4983.5, 14.1},  {157.5, 8499.2, 19.0}};
  std::vector<DataPoint> pts;
  pts.reserve(8);
  for (const auto& row : table) {
    pts.push_back({Angle::from_degrees(row[0]), row[1], row[2]});
  }
  return CoincidenceDataset(std::move(pts), "builtin-reference");
}

const char* to_string(LhvFamily f) {
  switch (f) {
    case LhvFamily::LHV0: return "LHV0";
    case LhvFamily::LHV1: return "LHV1";
    case LhvFamily::LHV2: return "LHV2";
    case LhvFamily::LHV3: return "LHV3";
    case LhvFamily::LHV4: return "LHV4";
  }
  return "?";
}

LhvFamily family_from_string(const std::string& name) {
  for (LhvFamily f : {LhvFamily::LHV0, LhvFamily::LHV1, LhvFamily::LHV2,
                      LhvFamily::LHV3, LhvFamily::LHV4}) {
    if (name == to_string(f)) return f;
  }
  throw ValidationError("unknown family '" + name + "'");
}

int family_rank(LhvFamily f) { return static_cast<int>(f); }

EfficiencyContext::EfficiencyContext(double eta, LhvFamily family)
    : eta_(eta), family_(family) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw ValidationError("eta must be in (0, 1]");
  }
}

}  // namespace belltest
