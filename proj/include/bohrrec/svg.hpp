#pragma once

#include "torus_boxes.hpp"

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace bohrrec {

struct SvgError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SvgLayer {
  BoxUnion u;
  std::string label;
};

namespace detail {

inline const char *level_color(std::size_t i)
{
  static const char *pal[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                              "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return pal[i % 10];
}

inline std::string num(double v)
{
  char b[32];
  std::snprintf(b, sizeof b, "%.4f", v);
  return b;
}

// [a, b) pieces of an arc inside [0,1)
inline std::vector<std::pair<double, double>> arc_pieces(const TorusInterval &iv)
{
  if (iv.full()) return {{0.0, 1.0}};
  if (iv.empty()) return {};
  double a = iv.start.get_d(), e = Rational(iv.start + iv.length).get_d();
  if (e <= 1.0) return {{a, e}};
  return {{a, 1.0}, {0.0, e - 1.0}};
}

} // namespace detail

// one row per layer for d = 1, overlaid translucent layers on the unit square for d = 2
inline std::string render_svg(const std::vector<SvgLayer> &layers, const std::string &title = "")
{
  if (layers.empty()) throw SvgError("nothing to draw");
  const std::size_t d = layers.front().u.d;
  for (auto &l : layers)
    if (l.u.d != d) throw SvgError("layers differ in dimension");
  if (d < 1 || d > 2) throw SvgError("svg export needs d in {1,2}, got d=" + std::to_string(d));
  const double W = 400, pad = 20, band = 24;
  const double H = d == 1 ? pad * 2 + band * static_cast<double>(layers.size()) + 16 : W + pad * 2 + 16;
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(W + 2 * pad) + "\" height=\"" + detail::num(H) +
       "\" viewBox=\"0 0 " + detail::num(W + 2 * pad) + " " + detail::num(H) + "\">\n";
  if (!title.empty()) s += "<title>" + title + "</title>\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + detail::num(W + 2 * pad) + "\" height=\"" + detail::num(H) + "\" fill=\"white\"/>\n";
  if (d == 1) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      double y = pad + band * static_cast<double>(i);
      s += "<g id=\"level" + std::to_string(i) + "\" fill=\"" + detail::level_color(i) + "\">\n";
      s += "<rect x=\"" + detail::num(pad) + "\" y=\"" + detail::num(y) + "\" width=\"" + detail::num(W) + "\" height=\"" +
           detail::num(band - 4) + "\" fill=\"none\" stroke=\"#999\"/>\n";
      for (auto &b : layers[i].u.boxes)
        for (auto [a, e] : detail::arc_pieces(b.iv[0]))
          s += "<rect x=\"" + detail::num(pad + a * W) + "\" y=\"" + detail::num(y) + "\" width=\"" + detail::num((e - a) * W) +
               "\" height=\"" + detail::num(band - 4) + "\"/>\n";
      s += "</g>\n";
    }
  } else {
    s += "<rect x=\"" + detail::num(pad) + "\" y=\"" + detail::num(pad) + "\" width=\"" + detail::num(W) + "\" height=\"" +
         detail::num(W) + "\" fill=\"none\" stroke=\"#999\"/>\n";
    for (std::size_t i = 0; i < layers.size(); ++i) {
      s += "<g id=\"level" + std::to_string(i) + "\" fill=\"" + detail::level_color(i) + "\" fill-opacity=\"0.5\">\n";
      for (auto &b : layers[i].u.boxes)
        for (auto [a0, e0] : detail::arc_pieces(b.iv[0]))
          for (auto [a1, e1] : detail::arc_pieces(b.iv[1]))
            // y axis points up
            s += "<rect x=\"" + detail::num(pad + a0 * W) + "\" y=\"" + detail::num(pad + (1 - e1) * W) + "\" width=\"" +
                 detail::num((e0 - a0) * W) + "\" height=\"" + detail::num((e1 - a1) * W) + "\"/>\n";
      s += "</g>\n";
    }
  }
  double ly = H - 6;
  std::string legend;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (!legend.empty()) legend += "  ";
    legend += layers[i].label;
  }
  s += "<text x=\"" + detail::num(pad) + "\" y=\"" + detail::num(ly) + "\" font-family=\"monospace\" font-size=\"11\">" + legend +
       "</text>\n";
  s += "</svg>\n";
  return s;
}

// levels T^a U, a = 0..p-1, of the rotation by alpha
inline std::vector<SvgLayer> tower_levels(const BoxUnion &u, const RatPoint &alpha, unsigned p)
{
  if (alpha.size() != u.d) throw SvgError("rotation and set differ in dimension");
  if (p < 1) throw SvgError("need at least one level");
  std::vector<SvgLayer> out;
  for (unsigned a = 0; a < p; ++a) out.push_back({translate(u, scale_point(alpha, static_cast<long>(a))), "T^" + std::to_string(a)});
  return out;
}

} // namespace bohrrec
