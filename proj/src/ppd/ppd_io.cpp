#include "xpert/ppd_io.hpp"

#include <stdexcept>

namespace xpert {

void to_json(nlohmann::json& j, const Ppd& p) {
  nlohmann::json grid = nlohmann::json::array();
  for (int r = 0; r < p.resolution(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < p.resolution(); ++c) row.push_back(p.at(r, c));
    grid.push_back(std::move(row));
  }
  j = nlohmann::json{{"H", p.resolution()}, {"grid", std::move(grid)}};
}

void from_json(const nlohmann::json& j, Ppd& p) {
  const int h = j.at("H").get<int>();
  const auto& grid = j.at("grid");
  if (!grid.is_array() || static_cast<int>(grid.size()) != h) {
    throw std::invalid_argument("ppd: grid must have H rows");
  }
  Ppd out(h);
  for (int r = 0; r < h; ++r) {
    if (!grid[r].is_array() || static_cast<int>(grid[r].size()) != h) {
      throw std::invalid_argument("ppd: grid row " + std::to_string(r) + " must have H entries");
    }
    for (int c = 0; c < h; ++c) out.at(r, c) = grid[r][c].get<std::uint32_t>();
  }
  p = std::move(out);
}

void to_json(nlohmann::json& j, const ExtendedPpd& p) {
  nlohmann::json channels = nlohmann::json::array();
  for (const auto& c : p.channels) channels.push_back(c);
  j = nlohmann::json{{"H", p.channels[0].resolution()},
                     {"channels", std::move(channels)},
                     {"b_max", p.b_max},
                     {"p_max", p.p_max}};
}

void from_json(const nlohmann::json& j, ExtendedPpd& p) {
  const auto& channels = j.at("channels");
  if (!channels.is_array() || channels.size() != 4) {
    throw std::invalid_argument("extended ppd: expected 4 channels");
  }
  const int h = j.at("H").get<int>();
  for (std::size_t c = 0; c < 4; ++c) {
    channels[c].get_to(p.channels[c]);
    if (p.channels[c].resolution() != h) throw std::invalid_argument("extended ppd: channel H mismatch");
  }
  p.b_max = j.at("b_max").get<double>();
  p.p_max = j.at("p_max").get<double>();
}

}  // namespace xpert
