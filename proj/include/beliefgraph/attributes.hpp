#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace beliefgraph {

enum class Color { red, blue, white, black, green, yellow };
enum class Material { plastic, paper, ceramic, glass, cardboard };
enum class Category { cup, marble, box, noodle, bottle };

inline constexpr std::array<std::string_view, 6> kColorNames{"red", "blue", "white", "black", "green", "yellow"};
inline constexpr std::array<std::string_view, 5> kMaterialNames{"plastic", "paper", "ceramic", "glass", "cardboard"};
inline constexpr std::array<std::string_view, 5> kCategoryNames{"cup", "marble", "box", "noodle", "bottle"};

template <typename Enum, std::size_t N>
std::string_view enum_name(Enum value, const std::array<std::string_view, N>& names) {
    return names.at(static_cast<std::size_t>(value));
}

template <typename Enum, std::size_t N>
Enum enum_from_name(std::string_view name, const std::array<std::string_view, N>& names) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == name) return static_cast<Enum>(i);
    }
    throw std::invalid_argument("unknown attribute value '" + std::string(name) + "'");
}

inline std::string_view to_string(Color c) { return enum_name(c, kColorNames); }
inline std::string_view to_string(Material m) { return enum_name(m, kMaterialNames); }
inline std::string_view to_string(Category c) { return enum_name(c, kCategoryNames); }

/// Discrete object attributes; the three slots compared by attribute consistency.
struct Attributes {
    Color color = Color::red;
    Material material = Material::plastic;
    Category category = Category::cup;

    bool operator==(const Attributes&) const = default;
};

inline constexpr int kAttributeSlots = 3;

/// Number of attribute slots on which the two tuples disagree.
inline int attribute_mismatches(const Attributes& a, const Attributes& b) {
    return (a.color != b.color ? 1 : 0) + (a.material != b.material ? 1 : 0) +
           (a.category != b.category ? 1 : 0);
}

/// Classifier output: one probability vector per attribute slot, plus the
/// probability that the object is empty.
struct AttributeScores {
    std::vector<double> color;
    std::vector<double> material;
    std::vector<double> category;
    double empty = 0.0;

    bool operator==(const AttributeScores&) const = default;
};

inline std::size_t argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

inline Attributes asserted_attributes(const AttributeScores& s) {
    return {static_cast<Color>(argmax(s.color)), static_cast<Material>(argmax(s.material)),
            static_cast<Category>(argmax(s.category))};
}

}  // namespace beliefgraph
