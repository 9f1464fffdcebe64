#include "schatten/dyadic_grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

namespace schatten {

namespace {

int parity_sign(int level) { return (level % 2 == 0) ? 1 : -1; }

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) throw GridError("dimension must be 1, 2 or 3");
}

// Lower-corner numerator over 3*2^level.
std::int64_t corner_num(const CubeId& id, int axis) {
  return 3 * id.offset[axis] + parity_sign(id.level) * id.shift.thirds[axis];
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

template <typename F>
void for_each_offset(int dim, const Offset& lo, const Offset& hi, F&& f) {
  for (int i = 0; i < dim; ++i)
    if (lo[i] > hi[i]) return;
  Offset m = lo;
  while (true) {
    f(m);
    int axis = dim - 1;
    while (axis >= 0) {
      if (++m[axis] <= hi[axis]) break;
      m[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) return;
  }
}

bool intersects(const Box& a, const Box& b) {
  for (int i = 0; i < a.dim; ++i)
    if (!(a.lower[i] < b.upper(i) && b.lower[i] < a.upper(i))) return false;
  return true;
}

}  // namespace

Shift Shift::zero(int dim) {
  check_dim(dim);
  Shift s;
  s.dim = dim;
  return s;
}

Shift Shift::from_thirds(int dim, std::span<const int> t) {
  check_dim(dim);
  if (static_cast<int>(t.size()) != dim) throw GridError("shift length does not match dimension");
  Shift s;
  s.dim = dim;
  for (int i = 0; i < dim; ++i) {
    if (t[i] < 0 || t[i] > 2) throw GridError("shift entries must be 0, 1/3 or 2/3");
    s.thirds[i] = static_cast<std::uint8_t>(t[i]);
  }
  return s;
}

bool Shift::is_zero() const {
  for (int i = 0; i < dim; ++i)
    if (thirds[i] != 0) return false;
  return true;
}

std::vector<Shift> all_shifts(int dim) {
  check_dim(dim);
  std::vector<Shift> out;
  int total = 1;
  for (int i = 0; i < dim; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    Shift s = Shift::zero(dim);
    int c = code;
    for (int i = dim - 1; i >= 0; --i) {
      s.thirds[i] = static_cast<std::uint8_t>(c % 3);
      c /= 3;
    }
    out.push_back(s);
  }
  return out;
}

double CubeId::side() const { return std::ldexp(1.0, -level); }
double CubeId::volume() const { return std::ldexp(1.0, -level * dim()); }

bool Box::contains(const Point& x) const {
  for (int i = 0; i < dim; ++i)
    if (!(lower[i] <= x[i] && x[i] < upper(i))) return false;
  return true;
}

bool Box::contains(const Box& other) const {
  const double eps = 1e-12 * side;
  for (int i = 0; i < dim; ++i)
    if (!(lower[i] <= other.lower[i] + eps && other.upper(i) <= upper(i) + eps)) return false;
  return true;
}

double Box::volume() const { return std::pow(side, dim); }

Box Box::dilate(double factor) const {
  Box b = *this;
  b.side = side * factor;
  for (int i = 0; i < dim; ++i) b.lower[i] = lower[i] + 0.5 * side - 0.5 * b.side;
  return b;
}

GridWindow GridWindow::unit(int dim, int samples, int k_min, int k_max) {
  GridWindow w;
  w.dim = dim;
  w.samples = samples;
  w.k_min = k_min;
  w.k_max = k_max;
  w.validate();
  return w;
}

GridWindow GridWindow::unit(int dim, int samples) {
  if (samples < 2 || !std::has_single_bit(static_cast<unsigned>(samples)))
    throw GridError("samples per side must be a power of two >= 2");
  return unit(dim, samples, 0, std::countr_zero(static_cast<unsigned>(samples)) - 1);
}

double GridWindow::cell_volume() const { return std::pow(spacing(), dim); }

std::size_t GridWindow::size() const {
  std::size_t s = 1;
  for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(samples);
  return s;
}

bool GridWindow::same_lattice(const GridWindow& o) const {
  return dim == o.dim && lower == o.lower && side == o.side && samples == o.samples;
}

void GridWindow::validate() const {
  check_dim(dim);
  if (samples < 2 || !std::has_single_bit(static_cast<unsigned>(samples)))
    throw GridError("samples per side must be a power of two >= 2");
  if (!(side > 0.0) || !std::isfinite(side)) throw GridError("window side must be positive");
  if (k_max - k_min < 1) throw GridError("level range needs k_max - k_min >= 1");
  if (std::ldexp(1.0, -k_max) < 2.0 * spacing())
    throw GridError("finest level is not resolved by two samples per side");
}

Box cube_geometry(const CubeId& id) {
  Box b;
  b.dim = id.dim();
  b.side = std::ldexp(1.0, -id.level);
  for (int i = 0; i < b.dim; ++i)
    b.lower[i] = std::ldexp(static_cast<double>(corner_num(id, i)) / 3.0, -id.level);
  return b;
}

CubeRelation relate(const CubeId& a, const CubeId& b) {
  if (a.dim() != b.dim()) throw GridError("cubes of different dimension");
  const int top = std::max(a.level, b.level);
  const std::int64_t sa = std::int64_t{1} << (top - a.level);
  const std::int64_t sb = std::int64_t{1} << (top - b.level);
  bool a_in_b = true, b_in_a = true;
  for (int i = 0; i < a.dim(); ++i) {
    const std::int64_t alo = corner_num(a, i) * sa, ahi = alo + 3 * sa;
    const std::int64_t blo = corner_num(b, i) * sb, bhi = blo + 3 * sb;
    if (ahi <= blo || bhi <= alo) return CubeRelation::disjoint;
    if (!(blo <= alo && ahi <= bhi)) a_in_b = false;
    if (!(alo <= blo && bhi <= ahi)) b_in_a = false;
  }
  if (a_in_b && b_in_a) return CubeRelation::equal;
  if (a_in_b) return CubeRelation::first_inside;
  if (b_in_a) return CubeRelation::second_inside;
  return CubeRelation::overlap;
}

double cube_distance(const CubeId& a, const CubeId& b) {
  const Box ba = cube_geometry(a), bb = cube_geometry(b);
  double d = 0.0;
  for (int i = 0; i < ba.dim; ++i) {
    const double gap = std::max({0.0, bb.lower[i] - ba.upper(i), ba.lower[i] - bb.upper(i)});
    d = std::max(d, gap);
  }
  return d;
}

std::vector<CubeId> children(const CubeId& id) {
  const int n = id.dim();
  const int s = parity_sign(id.level);
  std::vector<CubeId> out;
  out.reserve(std::size_t{1} << n);
  for (unsigned code = 0; code < (1u << n); ++code) {
    CubeId c = id;
    c.level = id.level + 1;
    for (int i = 0; i < n; ++i) {
      const int bit = (code >> (n - 1 - i)) & 1u;
      c.offset[i] = 2 * id.offset[i] + bit + s * id.shift.thirds[i];
    }
    out.push_back(c);
  }
  return out;
}

CubeId parent(const CubeId& id) {
  CubeId p = id;
  p.level = id.level - 1;
  const int s = parity_sign(p.level);
  for (int i = 0; i < id.dim(); ++i) p.offset[i] = floor_div(id.offset[i] - s * id.shift.thirds[i], 2);
  return p;
}

unsigned child_position(const CubeId& child) {
  const CubeId p = parent(child);
  const int s = parity_sign(p.level);
  unsigned bits = 0;
  for (int i = 0; i < child.dim(); ++i) {
    const std::int64_t c = child.offset[i] - s * child.shift.thirds[i] - 2 * p.offset[i];
    if (c == 1) bits |= 1u << i;
  }
  return bits;
}

CubeId locate(const Shift& shift, int level, const Point& x) {
  CubeId id;
  id.shift = shift;
  id.level = level;
  const int s = parity_sign(level);
  for (int i = 0; i < shift.dim; ++i) {
    if (!std::isfinite(x[i])) throw GridError("locate needs a finite point");
    const double scaled = 3.0 * std::ldexp(x[i], level) - s * shift.thirds[i];
    auto m = static_cast<std::int64_t>(std::floor(scaled / 3.0));
    // Guard the floating division at cell edges.
    for (int guard = 0; guard < 2; ++guard) {
      id.offset[i] = m;
      const Box b = cube_geometry(id);
      if (x[i] < b.lower[i]) --m;
      else if (x[i] >= b.upper(i)) ++m;
      else break;
    }
    id.offset[i] = m;
  }
  return id;
}

std::vector<CubeId> enumerate_cubes(const GridWindow& win, const Shift& shift) {
  if (shift.dim != win.dim) throw GridError("shift dimension does not match window");
  std::vector<CubeId> out;
  const Box dom = win.domain();
  for (int k = win.k_min; k <= win.k_max; ++k) {
    const double ell = std::ldexp(1.0, -k);
    const int s = parity_sign(k);
    Offset lo{}, hi{};
    for (int i = 0; i < win.dim; ++i) {
      const double t = s * shift.thirds[i] / 3.0;
      // one extra offset on each side, removed by the intersection filter
      lo[i] = static_cast<std::int64_t>(std::floor(dom.lower[i] / ell - 1.0 - t));
      hi[i] = static_cast<std::int64_t>(std::ceil(dom.upper(i) / ell - t));
    }
    for_each_offset(win.dim, lo, hi, [&](const Offset& m) {
      CubeId id{shift, k, m};
      if (intersects(cube_geometry(id), dom)) out.push_back(id);
    });
  }
  return out;
}

std::vector<CubeId> interior_cubes_at(const GridWindow& win, const Shift& shift, int level) {
  if (shift.dim != win.dim) throw GridError("shift dimension does not match window");
  std::vector<CubeId> out;
  const Box dom = win.domain();
  const double ell = std::ldexp(1.0, -level);
  const int s = parity_sign(level);
  Offset lo{}, hi{};
  for (int i = 0; i < win.dim; ++i) {
    // 3m + s t >= 3L/ell and 3m + s t + 3 <= 3H/ell
    const double a = 3.0 * dom.lower[i] / ell, b = 3.0 * dom.upper(i) / ell;
    lo[i] = static_cast<std::int64_t>(std::ceil((a - s * shift.thirds[i]) / 3.0));
    hi[i] = static_cast<std::int64_t>(std::floor((b - 3.0 - s * shift.thirds[i]) / 3.0));
  }
  for_each_offset(win.dim, lo, hi, [&](const Offset& m) {
    CubeId id{shift, level, m};
    if (dom.contains(cube_geometry(id))) out.push_back(id);
  });
  return out;
}

std::vector<CubeId> interior_cubes(const GridWindow& win, const Shift& shift) {
  std::vector<CubeId> out;
  for (int k = win.k_min; k <= win.k_max; ++k) {
    auto lvl = interior_cubes_at(win, shift, k);
    out.insert(out.end(), lvl.begin(), lvl.end());
  }
  return out;
}

WhitneyDecomposition whitney_pairs(const GridWindow& win) {
  win.validate();
  const int n = win.dim;
  WhitneyDecomposition dec;
  dec.first_level = win.k_min + 1;
  dec.last_level = win.k_max + 2;
  auto sup_gap = [n](const CubeId& a, const CubeId& b) {
    std::int64_t d = 0;
    for (int i = 0; i < n; ++i) d = std::max(d, std::abs(a.offset[i] - b.offset[i]));
    return d;
  };
  for (int k = dec.first_level; k <= dec.last_level; ++k) {
    const auto cubes = interior_cubes_at(win, Shift::zero(n), k);
    std::map<Offset, bool> present;
    for (const auto& c : cubes) present[c.offset] = true;
    for (const auto& q : cubes) {
      const CubeId pq = parent(q);
      int count = 0;
      Offset lo{}, hi{};
      for (int i = 0; i < n; ++i) {
        lo[i] = q.offset[i] - 5;
        hi[i] = q.offset[i] + 5;
      }
      for_each_offset(n, lo, hi, [&](const Offset& m) {
        if (!present.count(m)) return;
        CubeId r{q.shift, k, m};
        if (sup_gap(q, r) <= 2) return;
        if (sup_gap(pq, parent(r)) > 2) return;
        dec.pairs.push_back({q, r, ++count});
      });
      dec.max_partners = std::max(dec.max_partners, count);
    }
  }
  return dec;
}

CubeId far_cube(const CubeId& q, int j, const GridWindow& win) {
  if (j < 1 || j > q.dim()) throw GridError("direction out of range");
  CubeId f = q;
  f.offset[j - 1] += 2;
  if (!win.domain().contains(cube_geometry(f)))
    throw GridError("far cube " + to_string(f) + " leaves the window");
  return f;
}

std::optional<CubeId> covering_cube(const Box& box, int max_gap) {
  const int k0 = static_cast<int>(std::floor(-std::log2(box.side)));
  std::optional<CubeId> best;
  for (const auto& shift : all_shifts(box.dim)) {
    for (int k = k0; k >= k0 - max_gap; --k) {
      if (best && k <= best->level) break;
      const CubeId c = locate(shift, k, box.lower);
      if (cube_geometry(c).contains(box)) {
        best = c;
        break;
      }
    }
  }
  return best;
}

std::string to_string(const Shift& s) {
  static const char* names[] = {"0", "1/3", "2/3"};
  std::string out;
  for (int i = 0; i < s.dim; ++i) {
    if (i) out += ',';
    out += names[s.thirds[i]];
  }
  return out;
}

std::string to_string(const CubeId& id) {
  std::string out = to_string(id.shift) + ":" + std::to_string(id.level) + ":";
  for (int i = 0; i < id.dim(); ++i) {
    if (i) out += ',';
    out += std::to_string(id.offset[i]);
  }
  return out;
}

CubeId parse_cube_id(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) throw GridError("malformed cube id: " + text);
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    return parts;
  };
  const auto omega = split(text.substr(0, c1));
  const auto offs = split(text.substr(c2 + 1));
  if (omega.empty() || omega.size() != offs.size()) throw GridError("malformed cube id: " + text);
  std::vector<int> t;
  for (const auto& w : omega) {
    if (w == "0") t.push_back(0);
    else if (w == "1/3") t.push_back(1);
    else if (w == "2/3") t.push_back(2);
    else throw GridError("malformed shift entry: " + w);
  }
  CubeId id;
  try {
    id.shift = Shift::from_thirds(static_cast<int>(t.size()), t);
    id.level = std::stoi(text.substr(c1 + 1, c2 - c1 - 1));
    for (std::size_t i = 0; i < offs.size(); ++i) id.offset[i] = std::stoll(offs[i]);
  } catch (const std::logic_error&) {
    throw GridError("malformed cube id: " + text);
  }
  return id;
}

}  // namespace schatten
