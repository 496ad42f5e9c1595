#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tcr {

// An element of Z extended with -inf and +inf.
class ExtendedDelta {
public:
    enum class Kind : std::uint8_t { NegInf, Finite, PosInf };

    constexpr ExtendedDelta() = default;
    constexpr ExtendedDelta(std::int64_t v) : kind_(Kind::Finite), value_(v) {}

    static constexpr ExtendedDelta neg_inf() { return ExtendedDelta(Kind::NegInf); }
    static constexpr ExtendedDelta pos_inf() { return ExtendedDelta(Kind::PosInf); }

    constexpr Kind kind() const { return kind_; }
    constexpr bool is_finite() const { return kind_ == Kind::Finite; }
    constexpr bool is_neg_inf() const { return kind_ == Kind::NegInf; }
    constexpr bool is_pos_inf() const { return kind_ == Kind::PosInf; }

    std::int64_t value() const {
        if (!is_finite())
            throw std::domain_error("value() of an infinite ExtendedDelta");
        return value_;
    }

    // -inf + +inf is undefined and throws std::domain_error.
    friend ExtendedDelta operator+(ExtendedDelta a, ExtendedDelta b) {
        if ((a.is_neg_inf() && b.is_pos_inf()) || (a.is_pos_inf() && b.is_neg_inf()))
            throw std::domain_error("-inf + +inf is undefined");
        if (a.is_neg_inf() || b.is_neg_inf()) return neg_inf();
        if (a.is_pos_inf() || b.is_pos_inf()) return pos_inf();
        return ExtendedDelta(a.value_ + b.value_);
    }
    ExtendedDelta& operator+=(ExtendedDelta o) { return *this = *this + o; }

    constexpr ExtendedDelta operator-() const {
        switch (kind_) {
        case Kind::NegInf: return pos_inf();
        case Kind::PosInf: return neg_inf();
        default: return ExtendedDelta(-value_);
        }
    }

    friend constexpr bool operator==(ExtendedDelta a, ExtendedDelta b) {
        return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
    }
    friend constexpr std::strong_ordering operator<=>(ExtendedDelta a, ExtendedDelta b) {
        if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
        if (a.kind_ != Kind::Finite) return std::strong_ordering::equal;
        return a.value_ <=> b.value_;
    }

    std::string to_string() const;
    // Accepts "-inf", "+inf", "inf" and decimal integers.
    static ExtendedDelta parse(std::string_view text);

private:
    explicit constexpr ExtendedDelta(Kind k) : kind_(k) {}

    Kind kind_ = Kind::Finite;
    std::int64_t value_ = 0;
};

inline constexpr ExtendedDelta NEG_INF = ExtendedDelta::neg_inf();
inline constexpr ExtendedDelta POS_INF = ExtendedDelta::pos_inf();

inline ExtendedDelta min(ExtendedDelta a, ExtendedDelta b) { return b < a ? b : a; }
inline ExtendedDelta max(ExtendedDelta a, ExtendedDelta b) { return a < b ? b : a; }

} // namespace tcr
