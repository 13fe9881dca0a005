#pragma once

#include <string>
#include <vector>

namespace traitnet {

// Fixed-width text rendering for the human-readable mirrors of the JSON
// outputs. First column left-aligned, the rest right-aligned.
class TextTable {
public:
    void set_header(std::vector<std::string> cells);
    void add_row(std::vector<std::string> cells);
    void add_separator();
    std::string render() const;

    static std::string format(double value, int decimals = 4);
    static std::string format_p(double p);

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;  // empty row = separator
};

}  // namespace traitnet
