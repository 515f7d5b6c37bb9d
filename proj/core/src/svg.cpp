#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "cdr/bench.hpp"

namespace cdr::bench {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#17becf", "#8c564b", "#e377c2", "#bcbd22"};

class Viewport {
 public:
  Viewport(const geom::Box& b, double scale) : box_(b), scale_(scale) {}
  double x(double mx) const { return (mx - box_.min.x) * scale_; }
  double y(double my) const { return (box_.max.y - my) * scale_; }
  double width() const { return box_.width() * scale_; }
  double height() const { return box_.height() * scale_; }
  std::string points(const std::vector<geom::Vec2>& pts) const {
    std::string out;
    for (const auto& p : pts) out += fmt::format("{}{:.2f},{:.2f}", out.empty() ? "" : " ", x(p.x), y(p.y));
    return out;
  }

 private:
  geom::Box box_;
  double scale_;
};

}  // namespace

std::string renderSvg(const SvgScene& scene) {
  if (!scene.env) throw std::invalid_argument("svg: scene has no environment");
  const Viewport vp(scene.env->bounds(), scene.pixelsPerMeter);
  std::ostringstream out;
  out << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{:.0f}" height="{:.0f}" viewBox="0 0 {:.2f} {:.2f}">)",
                     vp.width(), vp.height(), vp.width(), vp.height())
      << '\n';
  out << fmt::format(R"(<rect class="bounds" x="0" y="0" width="{:.2f}" height="{:.2f}" fill="white" stroke="black"/>)",
                     vp.width(), vp.height())
      << '\n';

  out << "<g class=\"obstacles\">\n";
  for (const auto& poly : scene.env->obstacles())
    out << fmt::format(R"(<polygon points="{}" fill="#9e9e9e"/>)", vp.points(poly.vertices())) << '\n';
  out << "</g>\n<g class=\"skeleton\">\n";
  for (const auto* skel : scene.skeletons) {
    if (!skel) continue;
    for (const auto& e : skel->edges())
      out << fmt::format(R"(<polyline class="skeleton-edge" points="{}" fill="none" stroke="#7b1fa2" stroke-width="2"/>)",
                         vp.points(e.intermediates))
          << '\n';
    for (const auto& v : skel->vertices())
      out << fmt::format(R"(<circle class="skeleton-vertex" cx="{:.2f}" cy="{:.2f}" r="3" fill="#7b1fa2"/>)", vp.x(v.point.x),
                         vp.y(v.point.y))
          << '\n';
  }
  out << "</g>\n<g class=\"paths\">\n";
  for (std::size_t r = 0; r < scene.paths.size(); ++r)
    out << fmt::format(R"(<polyline class="robot-path" points="{}" fill="none" stroke="{}" stroke-width="2"/>)",
                       vp.points(scene.paths[r]), kPalette[r % kPalette.size()])
        << '\n';
  out << "</g>\n<g class=\"markers\">\n";
  for (std::size_t r = 0; r < scene.starts.size(); ++r)
    out << fmt::format(R"(<circle class="start" cx="{:.2f}" cy="{:.2f}" r="5" fill="{}"/>)", vp.x(scene.starts[r].x),
                       vp.y(scene.starts[r].y), kPalette[r % kPalette.size()])
        << '\n';
  for (std::size_t r = 0; r < scene.goals.size(); ++r) {
    const double gx = vp.x(scene.goals[r].x), gy = vp.y(scene.goals[r].y);
    out << fmt::format(R"(<rect class="goal" x="{:.2f}" y="{:.2f}" width="10" height="10" fill="none" stroke="{}" stroke-width="2"/>)",
                       gx - 5, gy - 5, kPalette[r % kPalette.size()])
        << '\n';
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

void emitSvg(const SvgScene& scene, const std::string& file) {
  const auto text = renderSvg(scene);
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file);
  out << text;
  if (!out.flush()) throw std::runtime_error("error writing " + file);
}

}  // namespace cdr::bench
