#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace decoh {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite or out-of-domain argument.
struct DomainError : Error {
    using Error::Error;
};

// Fitting window empty, too short, or degenerate.
struct FitError : Error {
    using Error::Error;
};

// Two sampled series do not share a compatible time grid.
struct GridMismatchError : Error {
    using Error::Error;
};

// Aggregated configuration problems; every violated constraint is listed.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> problems)
        : Error(join(problems)), problems_(std::move(problems)) {}

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string join(const std::vector<std::string>& p) {
        std::string out = "invalid configuration:";
        for (const auto& s : p) {
            out += "\n  - ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> problems_;
};

}  // namespace decoh
