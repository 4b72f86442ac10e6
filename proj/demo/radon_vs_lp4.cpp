// Two strictly convex norms, two different answers: Birkhoff orthogonality is
// symmetric in the Radon plane but not in l^4, and neither survives taking the
// product with R.

#include <cstdio>

#include "orthogeo/orthogonality.hpp"
#include "orthogeo/properties.hpp"
#include "orthogeo/space_parse.hpp"

using namespace orthogeo;

int main() {
  TrialConfig cfg;
  cfg.trials = 500;
  cfg.seed = 2024;

  std::printf("%-10s %-6s %-8s %s\n", "space", "prop", "verdict", "worst margin");
  for (const char* name : {"radon:4", "lp:4"}) {
    const SpaceHandle s = parse_space(name);
    for (Property p : {Property::so, Property::ne, Property::so_star}) {
      const PropertyVerdict v = check_property(s, p, cfg);
      std::printf("%-10s %-6s %-8s %.3g\n", name, std::string(property_name(p)).c_str(),
                  std::string(status_name(v.status)).c_str(), v.worst_margin);
    }
  }

  // The classic asymmetric pair in l^4.
  const SpaceHandle l4 = parse_space("lp:4");
  const Point o{0.0, 0.0}, u{2.0, 1.0}, w{1.0, -8.0};
  const OrthoMargin m = ortho_margins(*l4, l4->geodesic(o, u), l4->geodesic(o, -1.0 * w));
  std::printf("\nl4: (2,1) vs -(1,-8): forward %.3g, backward %.3g\n", m.forward, m.backward);
  std::printf("l_(2,1)((1,-8)) = %.3g, l_(1,-8)((2,1)) = %.3g\n", dual_functional(*l4->gauge(), u, w),
              dual_functional(*l4->gauge(), w, u));
}
