#include <cmath>
#include <stdexcept>
#include <string>

#include "sofa/dvm.hpp"

namespace sofa::dvm {
namespace {

void non_negative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("environment: ") + name +
                                " must be finite and non-negative");
  }
}

void positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("environment: ") + name + " must be positive");
  }
}

void non_negative(const std::array<double, kStageCount>& v, const char* name) {
  for (double x : v) non_negative(x, name);
}

}  // namespace

bool StageRates::valid() const {
  const double all[] = {mortality_young,     mortality_juvenile,   mortality_adult, maturation_young,
                        maturation_juvenile, max_reproduction_age, reproduction};
  for (double v : all) {
    if (!std::isfinite(v) || v < 0.0) return false;
  }
  return maturation_young < maturation_juvenile && maturation_juvenile < max_reproduction_age;
}

void EnvironmentConfig::validate() const {
  non_negative(surface_light, "surface_light");
  non_negative(light_attenuation, "light_attenuation");
  positive(light_half_saturation, "light_half_saturation");
  non_negative(visual_predation, "visual_predation");
  non_negative(background_mortality, "background_mortality");
  positive(max_depth, "max_depth");
  non_negative(boundary_mortality, "boundary_mortality");
  non_negative(food_max, "food_max");
  non_negative(food_peak_depth, "food_peak_depth");
  positive(food_layer_width, "food_layer_width");
  positive(food_half_saturation, "food_half_saturation");
  non_negative(max_intake, "max_intake");
  non_negative(feeding_depth, "feeding_depth");
  non_negative(feeding_depth_softness, "feeding_depth_softness");
  non_negative(feeding_speed_threshold, "feeding_speed_threshold");
  non_negative(feeding_speed_softness, "feeding_speed_softness");
  non_negative(basal_cost_surface, "basal_cost_surface");
  non_negative(basal_cost_deep, "basal_cost_deep");
  non_negative(thermocline_depth, "thermocline_depth");
  positive(thermocline_width, "thermocline_width");
  non_negative(ascent_cost, "ascent_cost");
  positive(young_maturation_energy, "young_maturation_energy");
  positive(juvenile_maturation_energy, "juvenile_maturation_energy");
  positive(adult_lifespan, "adult_lifespan");
  non_negative(egg_conversion, "egg_conversion");
  if (quadrature_points < 4) throw std::invalid_argument("environment: quadrature_points must be >= 4");
}

}  // namespace sofa::dvm
