#pragma once
#include <map>
#include <string>
#include <vector>

#include "common.hpp"

namespace twosector {

enum class VarRole { State, Control, Exogenous, ExpectationAux };

/// Level variables are solved in logs (percent deviations fall out of the
/// perturbation directly); Ramsey multipliers and welfare recursions can
/// change sign and stay in levels.
enum class VarScale { Log, Level };

struct VariableInfo {
    std::string name;
    VarRole role = VarRole::Control;
    VarScale scale = VarScale::Log;
};

class VariableRegistry {
public:
    int add(const std::string& name, VarRole role, VarScale scale = VarScale::Log) {
        if (index_.count(name)) throw ConfigError("duplicate variable name: " + name);
        int id = static_cast<int>(vars_.size());
        vars_.push_back({name, role, scale});
        index_[name] = id;
        return id;
    }
    int index(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw ConfigError("unknown variable: " + name);
        return it->second;
    }
    bool has(const std::string& name) const { return index_.count(name) > 0; }
    int size() const { return static_cast<int>(vars_.size()); }
    const VariableInfo& info(int i) const { return vars_[i]; }
    const std::string& name(int i) const { return vars_[i].name; }
    VarScale scale(int i) const { return vars_[i].scale; }
    const std::vector<VariableInfo>& all() const { return vars_; }

private:
    std::vector<VariableInfo> vars_;
    std::map<std::string, int> index_;
};

}  // namespace twosector
