#pragma once

#include <compare>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hcif {

/// Key of a valuation entry: a plain variable or its derivative.
struct VarKey {
    std::string name;
    bool dotted = false;

    VarKey() = default;
    VarKey(std::string n, bool d = false) : name(std::move(n)), dotted(d) {}
    VarKey(const char* n) : name(n) {}

    static VarKey derivative(std::string n) { return {std::move(n), true}; }

    friend auto operator<=>(const VarKey&, const VarKey&) = default;
    friend bool operator==(const VarKey&, const VarKey&) = default;
};

std::string to_string(const VarKey& key);

/// Assignment of reals to plain and dotted variables.
class Valuation {
public:
    using Map = std::map<VarKey, double>;

    Valuation() = default;
    Valuation(std::initializer_list<Map::value_type> init) : values_(init) {}

    [[nodiscard]] bool contains(const VarKey& key) const { return values_.count(key) != 0; }
    [[nodiscard]] std::optional<double> find(const VarKey& key) const;
    /// Throws UnboundVariable.
    [[nodiscard]] double at(const VarKey& key) const;
    void set(const VarKey& key, double value) { values_[key] = value; }

    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] bool empty() const { return values_.empty(); }
    [[nodiscard]] Map::const_iterator begin() const { return values_.begin(); }
    [[nodiscard]] Map::const_iterator end() const { return values_.end(); }

    friend bool operator==(const Valuation&, const Valuation&) = default;

private:
    Map values_;
};

/// Same key sets and every value within `tolerance` (absolute).
[[nodiscard]] bool approx_equal(const Valuation& a, const Valuation& b, double tolerance);

std::string to_string(const Valuation& v);

/// The post-action copy sigma+: same entries, read through stepped names.
struct SteppedValuation {
    Valuation values;
};

[[nodiscard]] SteppedValuation stepped(const Valuation& sigma);

enum class VarKind { discrete, continuous };

struct VarDecl {
    std::string name;
    VarKind kind = VarKind::continuous;

    friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

class Declarations {
public:
    Declarations() = default;
    Declarations(std::initializer_list<VarDecl> decls) : decls_(decls) {}
    explicit Declarations(std::vector<VarDecl> decls) : decls_(std::move(decls)) {}

    void add(VarDecl decl) { decls_.push_back(std::move(decl)); }

    [[nodiscard]] const std::vector<VarDecl>& all() const { return decls_; }
    [[nodiscard]] const VarDecl* find(const std::string& name) const;
    [[nodiscard]] bool is_discrete(const std::string& name) const;
    [[nodiscard]] bool is_continuous(const std::string& name) const;

    /// Every declared variable and its derivative bound to 0.
    [[nodiscard]] Valuation zero_valuation() const;

    friend bool operator==(const Declarations&, const Declarations&) = default;

private:
    std::vector<VarDecl> decls_;
};

/// Union of two declaration lists; the first occurrence of a name wins.
Declarations merge(const Declarations& a, const Declarations& b);

} // namespace hcif
