#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace bkvem {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
inline bool operator==(Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

// Signed area (positive for counter-clockwise order).
double signed_area(std::span<const Point2> poly);
Point2 area_centroid(std::span<const Point2> poly);
double diameter(std::span<const Point2> poly);
bool point_in_polygon(std::span<const Point2> poly, Point2 p);
bool is_self_intersecting(std::span<const Point2> poly);

}  // namespace bkvem
