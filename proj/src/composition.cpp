#include "bridgekit/composition.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bridgekit {

double WeightProfile::sum() const {
  return std::accumulate(w.begin(), w.end(), 0.0);
}

WeightProfile weights_from_coeffs(std::span<const StepCoefficients> coeffs) {
  if (coeffs.empty()) {
    throw std::invalid_argument("weights_from_coeffs: empty coefficient list");
  }
  const std::size_t n_steps = coeffs.size();
  WeightProfile profile;
  profile.w.resize(n_steps);
  // Walk backwards from the last step; `carry` is the product of the xi of
  // every step taken after the current one.
  double carry = 1.0;
  for (std::size_t j = n_steps; j-- > 0;) {
    profile.w[n_steps - 1 - j] = carry * coeffs[j].eta;
    profile.w_y += carry * coeffs[j].zeta;
    carry *= coeffs[j].xi;
  }
  profile.w_y += carry; // x_{t_N} = y
  return profile;
}

WeightProfile weights_closed_form_sb(const TimeGrid &grid,
                                     const std::function<double(double)> &alpha,
                                     const std::function<double(double)> &rho_sq) {
  const auto &t = grid.points;
  if (t.size() < 2) {
    throw std::invalid_argument("weights_closed_form_sb: empty grid");
  }
  const double rho_end_sq = rho_sq(1.0);
  const auto rho = [&](double tau) { return std::sqrt(rho_sq(tau)); };
  const auto rho_bar = [&](double tau) {
    return std::sqrt(std::max(rho_end_sq - rho_sq(tau), 0.0));
  };
  const auto ratio = [&](double tau) { return rho_bar(tau) / rho(tau); };

  const double rho0_sq = rho_sq(t.front());
  if (!(rho0_sq > 0.0)) {
    throw std::domain_error(
        "weights_closed_form_sb: rho_0 = 0 (t_0 must be positive)");
  }
  const double rhoN_sq = rho_sq(t.back());
  const double prefactor =
      alpha(t.front()) * std::sqrt(rho0_sq) * rho_bar(t.front()) / rhoN_sq;

  WeightProfile profile;
  const std::size_t n_steps = t.size() - 1;
  profile.w.resize(n_steps);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    profile.w[n - 1] = prefactor * (ratio(t[n - 1]) - ratio(t[n]));
  }
  profile.w_y = alpha(t.front()) * rho0_sq / (alpha(t.back()) * rhoN_sq);
  return profile;
}

WeightProfile weights_closed_form_sb(const Schedule &sched,
                                     const TimeGrid &grid) {
  if (!sched.is_sb_family()) {
    throw std::invalid_argument("weights_closed_form_sb: " +
                                to_string(sched.kind()) +
                                " is not a Schroedinger-bridge schedule");
  }
  return weights_closed_form_sb(
      grid, [&](double tau) { return sched.sb_terms(tau).alpha; },
      [&](double tau) { return sched.sb_terms(tau).rho_sq; });
}

std::vector<double> weight_times(const TimeGrid &grid) {
  // w_n belongs to the call made at t_n, n = 1..N (ascending indices).
  if (grid.traversal == Traversal::reverse) {
    return {grid.points.begin() + 1, grid.points.end()};
  }
  // Forward traversal: the last call is made at t_{N-1}.
  std::vector<double> out(grid.points.rbegin() + 1, grid.points.rend());
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string weights_to_csv(const WeightProfile &profile, const TimeGrid &grid) {
  const auto times = weight_times(grid);
  if (times.size() != profile.w.size()) {
    throw std::invalid_argument("weights_to_csv: grid/profile size mismatch");
  }
  std::string out = "step_index,t,weight\n";
  for (std::size_t n = 0; n < profile.w.size(); ++n) {
    out += std::to_string(n + 1) + "," + format_double(times[n]) + "," +
           format_double(profile.w[n]) + "\n";
  }
  out += "y,," + format_double(profile.w_y) + "\n";
  return out;
}

std::string weights_to_svg(const WeightProfile &profile, const TimeGrid &grid) {
  const auto times = weight_times(grid);
  constexpr double width = 640.0, height = 400.0, margin = 50.0;
  const double w_max =
      std::max(*std::max_element(profile.w.begin(), profile.w.end()), 1e-300);
  const auto px = [&](double t) { return margin + t * (width - 2 * margin); };
  const auto py = [&](double w) {
    return height - margin - w / w_max * (height - 2 * margin);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << margin << "\" y1=\"" << height - margin
      << "\" x2=\"" << width - margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\""
      << margin << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" "
         "points=\"";
  for (std::size_t n = 0; n < times.size(); ++n) {
    svg << format_double(px(times[n])) << ',' << format_double(py(profile.w[n]))
        << (n + 1 < times.size() ? " " : "");
  }
  svg << "\"/>\n";
  for (std::size_t n = 0; n < times.size(); ++n) {
    svg << "<circle cx=\"" << format_double(px(times[n])) << "\" cy=\""
        << format_double(py(profile.w[n])) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  }
  svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"14\">t</text>\n";
  svg << "<text x=\"14\" y=\"" << height / 2
      << "\" font-size=\"14\" transform=\"rotate(-90 14 " << height / 2
      << ")\">weight</text>\n";
  svg << "<text x=\"" << width - margin << "\" y=\"" << margin
      << "\" text-anchor=\"end\" font-size=\"12\">w_y = "
      << format_double(profile.w_y) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

} // namespace bridgekit
