#include "skirmish/arena.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>

namespace skirmish {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Section {
  std::string name;
  int index = 0;  // 1-based for indexed sections, 0 for [field]
  std::map<std::string, double> values;
};

double require_key(const Section& s, const std::string& key) {
  auto it = s.values.find(key);
  if (it == s.values.end()) {
    throw std::runtime_error("arena spec: section [" + s.name + "] missing key '" + key + "'");
  }
  return it->second;
}

Rect rect_of(const Section& s) {
  return Rect{require_key(s, "x"), require_key(s, "y"), require_key(s, "hx"),
              require_key(s, "hy")};
}

bool rect_inside_field(const Rect& r, double length, double width) {
  return r.min_x() >= 0.0 && r.max_x() <= length && r.min_y() >= 0.0 &&
         r.max_y() <= width && r.hx > 0.0 && r.hy > 0.0;
}

bool same_rect(const Rect& a, const Rect& b, double tol) {
  return std::abs(a.cx - b.cx) <= tol && std::abs(a.cy - b.cy) <= tol &&
         std::abs(a.hx - b.hx) <= tol && std::abs(a.hy - b.hy) <= tol;
}

}  // namespace

Arena load_arena(const std::string& spec_text) {
  std::vector<Section> sections;
  std::istringstream in(spec_text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::runtime_error("arena spec: malformed section header at line " +
                                 std::to_string(line_no));
      }
      std::string inner = trim(line.substr(1, line.size() - 2));
      Section sec;
      if (auto sp = inner.find(' '); sp != std::string::npos) {
        sec.name = trim(inner.substr(0, sp));
        std::string idx = trim(inner.substr(sp + 1));
        try {
          sec.index = std::stoi(idx);
        } catch (...) {
          throw std::runtime_error("arena spec: bad section index '" + idx + "' at line " +
                                   std::to_string(line_no));
        }
      } else {
        sec.name = inner;
      }
      sections.push_back(std::move(sec));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos || sections.empty()) {
      throw std::runtime_error("arena spec: expected 'key = value' at line " +
                               std::to_string(line_no));
    }
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    try {
      size_t used = 0;
      double v = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
      sections.back().values[key] = v;
    } catch (...) {
      throw std::runtime_error("arena spec: bad numeric value '" + val + "' at line " +
                               std::to_string(line_no));
    }
  }

  Arena arena;
  bool have_field = false;
  std::vector<Section> obstacles, births, zones;
  for (auto& sec : sections) {
    if (sec.name == "field") {
      arena.length = require_key(sec, "length");
      arena.width = require_key(sec, "width");
      have_field = true;
    } else if (sec.name == "obstacle") {
      obstacles.push_back(sec);
    } else if (sec.name == "birth") {
      births.push_back(sec);
    } else if (sec.name == "zone") {
      zones.push_back(sec);
    } else {
      throw std::runtime_error("arena spec: unknown section [" + sec.name + "]");
    }
  }
  if (!have_field) throw std::runtime_error("arena spec: missing [field] section");
  if (arena.length <= 0.0 || arena.width <= 0.0) {
    throw std::runtime_error("arena spec: field dimensions must be positive");
  }
  if (obstacles.size() != 9) {
    throw std::runtime_error("arena spec: expected 9 obstacles, got " +
                             std::to_string(obstacles.size()));
  }
  if (births.size() != 4) {
    throw std::runtime_error("arena spec: expected 4 birth areas, got " +
                             std::to_string(births.size()));
  }
  if (zones.size() != 6) {
    throw std::runtime_error("arena spec: expected 6 zones, got " +
                             std::to_string(zones.size()));
  }

  auto index_sorted = [](std::vector<Section>& v) {
    std::sort(v.begin(), v.end(), [](const Section& a, const Section& b) {
      return a.index < b.index;
    });
    for (size_t i = 0; i < v.size(); ++i) {
      if (v[i].index != static_cast<int>(i) + 1) {
        throw std::runtime_error("arena spec: [" + v[i].name + "] indices must be 1..N");
      }
    }
  };
  index_sorted(obstacles);
  index_sorted(births);
  index_sorted(zones);

  for (auto& sec : obstacles) {
    Obstacle ob{rect_of(sec), require_key(sec, "height")};
    if (!rect_inside_field(ob.rect, arena.length, arena.width)) {
      throw std::runtime_error("arena spec: obstacle " + std::to_string(sec.index) +
                               " outside field");
    }
    arena.obstacles.push_back(ob);
  }
  for (auto& sec : births) {
    Rect r = rect_of(sec);
    if (!rect_inside_field(r, arena.length, arena.width)) {
      throw std::runtime_error("arena spec: birth area " + std::to_string(sec.index) +
                               " outside field");
    }
    arena.birth_areas.push_back(r);
  }
  for (auto& sec : zones) {
    Rect r = rect_of(sec);
    if (!rect_inside_field(r, arena.length, arena.width)) {
      throw std::runtime_error("arena spec: zone " + std::to_string(sec.index) +
                               " outside field");
    }
    arena.zones.push_back(r);
  }

  // The layout must be invariant under 180 degree rotation about the field
  // center (geometry only; heights are labels).
  constexpr double kTol = 1e-9;
  for (const auto& ob : arena.obstacles) {
    Rect rotated{arena.length - ob.rect.cx, arena.width - ob.rect.cy, ob.rect.hx, ob.rect.hy};
    bool found = false;
    for (const auto& other : arena.obstacles) {
      if (same_rect(rotated, other.rect, kTol)) {
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::runtime_error("arena spec: obstacle layout is not symmetric under 180 degree rotation");
    }
  }

  arena.build_grid();
  return arena;
}

void Arena::build_grid() {
  nx = static_cast<int>(std::lround(length / cell_size));
  ny = static_cast<int>(std::lround(width / cell_size));
  occupied.assign(static_cast<size_t>(nx) * ny, 0);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      if (!is_free(cell_center(ix, iy), inflation)) occupied[iy * nx + ix] = 1;
    }
  }
}

bool Arena::is_free(Vec2 p, double infl) const {
  if (p.x < infl || p.x > length - infl || p.y < infl || p.y > width - infl) return false;
  for (const auto& ob : obstacles) {
    if (ob.rect.distance(p) <= infl) return false;
  }
  return true;
}

bool Arena::line_of_sight(Vec2 a, Vec2 b) const {
  for (const auto& ob : obstacles) {
    if (segment_intersects_rect(a, b, ob.rect)) return false;
  }
  return true;
}

Vec2 Arena::nearest_free_cell(Vec2 p) const {
  auto cells = nearest_free_cells(p, 1);
  return cells.front();
}

std::vector<Vec2> Arena::nearest_free_cells(Vec2 p, int n) const {
  int cx = std::clamp(cell_x(p.x), 0, nx - 1);
  int cy = std::clamp(cell_y(p.y), 0, ny - 1);
  struct Cand {
    double d;
    int idx;
    Vec2 c;
  };
  std::vector<Cand> found;
  int max_ring = std::max(nx, ny);
  for (int ring = 0; ring <= max_ring; ++ring) {
    for (int iy = cy - ring; iy <= cy + ring; ++iy) {
      for (int ix = cx - ring; ix <= cx + ring; ++ix) {
        if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != ring) continue;
        if (!cell_in_bounds(ix, iy) || cell_occupied(ix, iy)) continue;
        Vec2 c = cell_center(ix, iy);
        found.push_back({dist(c, p), iy * nx + ix, c});
      }
    }
    // One extra ring corrects the Chebyshev/Euclidean mismatch at the rim.
    if (static_cast<int>(found.size()) >= n && ring > 0) break;
  }
  std::sort(found.begin(), found.end(), [](const Cand& a, const Cand& b) {
    return a.d != b.d ? a.d < b.d : a.idx < b.idx;
  });
  std::vector<Vec2> out;
  for (const auto& c : found) {
    out.push_back(c.c);
    if (static_cast<int>(out.size()) == n) break;
  }
  if (out.empty()) out.push_back(cell_center(cx, cy));  // fully blocked grid
  while (static_cast<int>(out.size()) < n) out.push_back(out.back());
  return out;
}

std::vector<double> lidar_scan(const Arena& arena, const Pose& pose, int n_rays,
                               double max_range, std::span<const Circle> robots) {
  std::vector<double> ranges(static_cast<size_t>(n_rays), max_range);
  const double fan = 1.5 * kPi;  // 270 degrees
  Vec2 origin = pose.position();
  for (int i = 0; i < n_rays; ++i) {
    double frac = n_rays > 1 ? static_cast<double>(i) / (n_rays - 1) : 0.5;
    double bearing = pose.theta - 0.5 * fan + frac * fan;
    Vec2 dir{std::cos(bearing), std::sin(bearing)};
    double t = kInf;
    // field walls (ray exits the field box)
    if (dir.x > 0.0) t = std::min(t, (arena.length - origin.x) / dir.x);
    if (dir.x < 0.0) t = std::min(t, -origin.x / dir.x);
    if (dir.y > 0.0) t = std::min(t, (arena.width - origin.y) / dir.y);
    if (dir.y < 0.0) t = std::min(t, -origin.y / dir.y);
    for (const auto& ob : arena.obstacles) {
      t = std::min(t, ray_rect_hit(origin, dir, ob.rect));
    }
    for (const auto& robot : robots) {
      t = std::min(t, ray_circle_hit(origin, dir, robot));
    }
    ranges[i] = std::min(t, max_range);
  }
  return ranges;
}

const std::string& default_arena_text() {
  static const std::string text =
      R"(# Default arena layout. Distances are meters. Rectangles are given as a
# center (x, y) plus half extents (hx, hy); obstacle height is a label.
# The obstacle set is symmetric under a 180 degree rotation about the
# field center.

[field]
length = 8.1
width = 5.1

[obstacle 1]
x = 1.6
y = 4.3
hx = 0.5
hy = 0.1
height = 0.4

[obstacle 2]
x = 6.5
y = 0.8
hx = 0.5
hy = 0.1
height = 0.4

[obstacle 3]
x = 1.6
y = 1.2
hx = 0.1
hy = 0.5
height = 0.2

[obstacle 4]
x = 6.5
y = 3.9
hx = 0.1
hy = 0.5
height = 0.2

[obstacle 5]
x = 4.05
y = 0.45
hx = 0.5
hy = 0.1
height = 0.8

[obstacle 6]
x = 4.05
y = 4.65
hx = 0.5
hy = 0.1
height = 0.8

[obstacle 7]
x = 2.45
y = 2.55
hx = 0.1
hy = 0.4
height = 0.4

[obstacle 8]
x = 5.65
y = 2.55
hx = 0.1
hy = 0.4
height = 0.4

[obstacle 9]
x = 4.05
y = 2.55
hx = 0.175
hy = 0.175
height = 0.4

[birth 1]
x = 0.5
y = 0.5
hx = 0.5
hy = 0.5

[birth 2]
x = 0.5
y = 4.6
hx = 0.5
hy = 0.5

[birth 3]
x = 7.6
y = 0.5
hx = 0.5
hy = 0.5

[birth 4]
x = 7.6
y = 4.6
hx = 0.5
hy = 0.5

[zone 1]
x = 1.9
y = 0.5
hx = 0.27
hy = 0.24

[zone 2]
x = 6.2
y = 4.6
hx = 0.27
hy = 0.24

[zone 3]
x = 4.05
y = 1.7
hx = 0.27
hy = 0.24

[zone 4]
x = 4.05
y = 3.4
hx = 0.27
hy = 0.24

[zone 5]
x = 0.5
y = 2.55
hx = 0.27
hy = 0.24

[zone 6]
x = 7.6
y = 2.55
hx = 0.27
hy = 0.24
)";
  return text;
}

}  // namespace skirmish
