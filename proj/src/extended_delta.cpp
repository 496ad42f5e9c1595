#include "tcr/extended_delta.hpp"

#include <charconv>

namespace tcr {

std::string ExtendedDelta::to_string() const {
    switch (kind_) {
    case Kind::NegInf: return "-inf";
    case Kind::PosInf: return "+inf";
    default: return std::to_string(value_);
    }
}

ExtendedDelta ExtendedDelta::parse(std::string_view text) {
    if (text == "-inf") return neg_inf();
    if (text == "+inf" || text == "inf") return pos_inf();
    std::int64_t v = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && text.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last)
        throw std::invalid_argument("not an extended integer: '" + std::string(text) + "'");
    return ExtendedDelta(v);
}

} // namespace tcr
