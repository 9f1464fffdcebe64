#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace schatten {

inline constexpr int kMaxDim = 3;

using Point = std::array<double, kMaxDim>;
using Offset = std::array<std::int64_t, kMaxDim>;

class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shift vector with entries in {0, 1/3, 2/3}, stored as thirds.
struct Shift {
  int dim = 1;
  std::array<std::uint8_t, kMaxDim> thirds{};

  static Shift zero(int dim);
  static Shift from_thirds(int dim, std::span<const int> t);

  double value(int axis) const { return thirds[axis] / 3.0; }
  bool is_zero() const;

  auto operator<=>(const Shift&) const = default;
};

/// All 3^n shifts, zero shift first.
std::vector<Shift> all_shifts(int dim);

struct CubeId {
  Shift shift;
  int level = 0;
  Offset offset{};

  int dim() const { return shift.dim; }
  double side() const;
  double volume() const;

  auto operator<=>(const CubeId&) const = default;
};

struct Box {
  int dim = 1;
  Point lower{};
  double side = 1.0;

  double upper(int axis) const { return lower[axis] + side; }
  bool contains(const Point& x) const;
  bool contains(const Box& other) const;
  double volume() const;
  Box dilate(double factor) const;

  bool operator==(const Box&) const = default;
};

/// Truncation of the dyadic lattice: a cubic domain sampled at N points
/// per side with dyadic levels k_min..k_max.
struct GridWindow {
  int dim = 1;
  Point lower{};
  double side = 1.0;
  int samples = 16;
  int k_min = 0;
  int k_max = 3;

  static GridWindow unit(int dim, int samples, int k_min, int k_max);
  /// Unit cube with levels 0 .. log2(N)-1.
  static GridWindow unit(int dim, int samples);

  double spacing() const { return side / samples; }
  double cell_volume() const;
  std::size_t size() const;
  Box domain() const { return Box{dim, lower, side}; }
  /// Same domain and samples; level ranges may differ.
  bool same_lattice(const GridWindow& other) const;
  void validate() const;

  bool operator==(const GridWindow&) const = default;
};

enum class CubeRelation { disjoint, equal, first_inside, second_inside, overlap };

Box cube_geometry(const CubeId& id);
/// Exact comparison in rational arithmetic.
CubeRelation relate(const CubeId& a, const CubeId& b);
/// Sup-metric gap between two cube boxes.
double cube_distance(const CubeId& a, const CubeId& b);

std::vector<CubeId> children(const CubeId& id);
CubeId parent(const CubeId& id);
/// Child position bits: bit i set when the child is the upper half along axis i.
unsigned child_position(const CubeId& child);
CubeId locate(const Shift& shift, int level, const Point& x);

std::vector<CubeId> enumerate_cubes(const GridWindow& win, const Shift& shift);
/// Cubes of the window levels contained in the domain.
std::vector<CubeId> interior_cubes(const GridWindow& win, const Shift& shift);
std::vector<CubeId> interior_cubes_at(const GridWindow& win, const Shift& shift, int level);

struct WhitneyPair {
  CubeId q;
  CubeId r;
  int index = 1;
};

struct WhitneyDecomposition {
  std::vector<WhitneyPair> pairs;
  int max_partners = 0;
  int first_level = 0;
  int last_level = 0;
};

/// Standard-grid Whitney pairs at levels k_min+1 .. k_max+2: equal cubes
/// that are separated while their parents are near.
WhitneyDecomposition whitney_pairs(const GridWindow& win);

/// Q translated by 2 sidelengths along coordinate j (1-based).
CubeId far_cube(const CubeId& q, int j, const GridWindow& win);

/// Smallest cube from any shifted system containing the box, no larger
/// than 2^max_gap times the box side.
std::optional<CubeId> covering_cube(const Box& box, int max_gap);

std::string to_string(const Shift& s);
std::string to_string(const CubeId& id);
CubeId parse_cube_id(const std::string& text);

}  // namespace schatten
