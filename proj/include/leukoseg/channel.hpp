#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "leukoseg/histogram.hpp"
#include "leukoseg/swam.hpp"

namespace leukoseg {

// The three single-channel views used for cytoplasm candidates.
enum class Channel { kG, kH, kS };

inline constexpr std::array<Channel, 3> kAllChannels = {Channel::kG, Channel::kH, Channel::kS};

constexpr std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::kG: return "G";
    case Channel::kH: return "H";
    case Channel::kS: return "S";
  }
  return "?";
}

std::optional<Channel> parse_channel(std::string_view name);

// Number of fuzzy classes used for the channel's threshold search.
constexpr int classes_for(Channel c) {
  switch (c) {
    case Channel::kG: return 4;
    case Channel::kH: return 3;
    case Channel::kS: return 2;
  }
  return 2;
}

// Leukocytes are dark in G and bright in H and S.
constexpr LevelOrder level_order(Channel c) {
  return c == Channel::kG ? LevelOrder::kDescending : LevelOrder::kAscending;
}

constexpr Polarity cell_polarity(Channel c) {
  return c == Channel::kG ? Polarity::kKeepBelow : Polarity::kKeepAbove;
}

}  // namespace leukoseg
