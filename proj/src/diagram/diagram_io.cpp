#include "xpert/diagram_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace xpert {

void to_json(nlohmann::json& j, const PersistenceDiagram& d) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : d.points) points.push_back({p.birth, p.death});
  j = nlohmann::json{{"homology_dim", d.homology_dim}, {"points", std::move(points)}};
}

void from_json(const nlohmann::json& j, PersistenceDiagram& d) {
  d.homology_dim = j.at("homology_dim").get<int>();
  if (d.homology_dim < 0) throw std::invalid_argument("diagram: negative homology_dim");
  d.points.clear();
  for (const auto& p : j.at("points")) {
    if (!p.is_array() || p.size() != 2) throw std::invalid_argument("diagram: point is not a pair");
    const DiagramPoint pt{p[0].get<double>(), p[1].get<double>()};
    if (!std::isfinite(pt.birth) || !std::isfinite(pt.death)) {
      throw std::invalid_argument("diagram: non-finite coordinate");
    }
    d.points.push_back(pt);
  }
}

void to_json(nlohmann::json& j, const ExtendedPersistenceDiagram& e) {
  j = nlohmann::json{{"ord0", e.ord0},
                     {"rel1", e.rel1},
                     {"ext0_plus", e.ext0_plus},
                     {"ext1_minus", e.ext1_minus}};
}

void from_json(const nlohmann::json& j, ExtendedPersistenceDiagram& e) {
  j.at("ord0").get_to(e.ord0);
  j.at("rel1").get_to(e.rel1);
  j.at("ext0_plus").get_to(e.ext0_plus);
  j.at("ext1_minus").get_to(e.ext1_minus);
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace xpert
