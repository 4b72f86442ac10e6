#pragma once

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "orthogeo/space.hpp"

namespace orthogeo {

/// Unparseable space descriptor; `token()` is the offending fragment.
class SpaceParseError : public std::invalid_argument {
public:
  SpaceParseError(const std::string& token, const std::string& why)
      : std::invalid_argument("cannot parse space token '" + token + "': " + why), token_(token) {}
  const std::string& token() const { return token_; }

private:
  std::string token_;
};

namespace detail {

inline double parse_real(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) throw SpaceParseError(std::string(s), "expected a real number");
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// "x/y,x/y,..." -> planar points.
inline std::vector<Point> parse_vertices(std::string_view s) {
  std::vector<Point> pts;
  for (auto v : split(s, ',')) {
    auto xy = split(v, '/');
    if (xy.size() != 2) throw SpaceParseError(std::string(v), "vertex must be x/y");
    pts.push_back(Point{parse_real(xy[0]), parse_real(xy[1])});
  }
  return pts;
}

template <class Build>
SpaceHandle wrap_invalid(std::string_view token, Build&& build) {
  try {
    return build();
  } catch (const SpaceParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SpaceParseError(std::string(token), e.what());
  }
}

}  // namespace detail

/// Parses a compact space descriptor:
///   euclidean:N  lp:P  radon:P  polynorm:x/y,...  klein  cap:R
///   hilbert:square  hilbert:triangle  hilbert:ellipse[:a=A,b=B]  hilbert:polygon:x/y,...
///   prod(<inner>)
/// The returned space is named by the descriptor exactly as given.
inline SpaceHandle parse_space(std::string_view text) {
  using detail::parse_real;
  const std::string name(text);
  if (text.starts_with("prod(")) {
    if (!text.ends_with(")")) throw SpaceParseError(name, "unbalanced parenthesis");
    SpaceHandle inner = parse_space(text.substr(5, text.size() - 6));
    return SpaceHandle(std::make_shared<ProductSpace>(inner, name));
  }
  if (text == "klein") return make_klein();

  const std::size_t colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

  if (head == "euclidean") {
    const double n = parse_real(rest);
    if (n != std::floor(n) || n < 1 || n > 6) throw SpaceParseError(std::string(rest), "dimension must be an integer in [1,6]");
    return SpaceHandle(std::make_shared<EuclideanSpace>(static_cast<std::size_t>(n), name));
  }
  if (head == "lp")
    return detail::wrap_invalid(rest, [&] { return make_normed_plane(NormGauge::lp(parse_real(rest)), name); });
  if (head == "radon")
    return detail::wrap_invalid(rest, [&] { return make_normed_plane(NormGauge::radon(parse_real(rest)), name); });
  if (head == "polynorm")
    return detail::wrap_invalid(
        rest, [&] { return make_normed_plane(NormGauge::polygon(detail::parse_vertices(rest)), name); });
  if (head == "cap")
    return detail::wrap_invalid(rest, [&] { return make_sphere_cap(parse_real(rest), name); });
  if (head == "hilbert") {
    if (rest == "square")
      return make_hilbert(ConvexBody::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}), name);
    if (rest == "triangle")
      return make_hilbert(ConvexBody::polygon({{-1, -1}, {1, -1}, {0, 1}}), name);
    if (rest.starts_with("polygon:"))
      return detail::wrap_invalid(rest, [&] {
        return make_hilbert(ConvexBody::polygon(detail::parse_vertices(rest.substr(8))), name);
      });
    if (rest == "ellipse" || rest.starts_with("ellipse:")) {
      double a = 1.0, b = 0.5;
      if (rest.size() > 8) {
        for (auto kv : detail::split(rest.substr(8), ',')) {
          if (kv.starts_with("a=")) a = parse_real(kv.substr(2));
          else if (kv.starts_with("b=")) b = parse_real(kv.substr(2));
          else throw SpaceParseError(std::string(kv), "expected a=<real> or b=<real>");
        }
      }
      return detail::wrap_invalid(rest, [&] { return make_hilbert(ConvexBody::ellipse(Point{0.0, 0.0}, a, b), name); });
    }
    throw SpaceParseError(std::string(rest), "unknown convex body");
  }
  throw SpaceParseError(std::string(head), "unknown space family");
}

}  // namespace orthogeo
