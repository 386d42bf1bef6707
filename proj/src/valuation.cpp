#include "hcif/valuation.hpp"

#include "hcif/errors.hpp"

#include <cmath>
#include <sstream>

namespace hcif {

std::string to_string(const VarKey& key)
{
    return key.dotted ? key.name + "'" : key.name;
}

std::optional<double> Valuation::find(const VarKey& key) const
{
    auto it = values_.find(key);
    if (it == values_.end())
        return std::nullopt;
    return it->second;
}

double Valuation::at(const VarKey& key) const
{
    auto it = values_.find(key);
    if (it == values_.end())
        throw UnboundVariable(to_string(key));
    return it->second;
}

bool approx_equal(const Valuation& a, const Valuation& b, double tolerance)
{
    if (a.size() != b.size())
        return false;
    auto ib = b.begin();
    for (const auto& [key, value] : a) {
        if (!(key == ib->first))
            return false;
        if (!(std::fabs(value - ib->second) <= tolerance))
            return false;
        ++ib;
    }
    return true;
}

std::string to_string(const Valuation& v)
{
    std::ostringstream os;
    os.precision(17);
    os << '{';
    bool first = true;
    for (const auto& [key, value] : v) {
        if (!first)
            os << ", ";
        first = false;
        os << to_string(key) << "=" << value;
    }
    os << '}';
    return os.str();
}

SteppedValuation stepped(const Valuation& sigma)
{
    return SteppedValuation{sigma};
}

const VarDecl* Declarations::find(const std::string& name) const
{
    for (const auto& d : decls_)
        if (d.name == name)
            return &d;
    return nullptr;
}

bool Declarations::is_discrete(const std::string& name) const
{
    const auto* d = find(name);
    return d != nullptr && d->kind == VarKind::discrete;
}

bool Declarations::is_continuous(const std::string& name) const
{
    const auto* d = find(name);
    return d != nullptr && d->kind == VarKind::continuous;
}

Valuation Declarations::zero_valuation() const
{
    Valuation v;
    for (const auto& d : decls_) {
        v.set(VarKey(d.name), 0.0);
        v.set(VarKey::derivative(d.name), 0.0);
    }
    return v;
}

Declarations merge(const Declarations& a, const Declarations& b)
{
    Declarations out = a;
    for (const auto& d : b.all())
        if (out.find(d.name) == nullptr)
            out.add(d);
    return out;
}

} // namespace hcif
