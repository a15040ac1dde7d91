#include "leukoseg/channel.hpp"

namespace leukoseg {

std::optional<Channel> parse_channel(std::string_view name) {
  for (Channel c : kAllChannels) {
    if (channel_name(c) == name) return c;
  }
  return std::nullopt;
}

}  // namespace leukoseg
