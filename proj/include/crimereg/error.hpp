#pragma once

#include <stdexcept>
#include <string>

namespace crimereg {

/// Error raised by any analysis module. `module()` names the stage that
/// failed so the CLI can report "module: cause".
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

} // namespace crimereg
