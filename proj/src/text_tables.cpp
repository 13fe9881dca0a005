#include "traitnet/text_tables.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace traitnet {

void TextTable::set_header(std::vector<std::string> cells) { header_ = std::move(cells); }

void TextTable::add_row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

void TextTable::add_separator() { rows_.emplace_back(); }

std::string TextTable::render() const {
    std::vector<std::size_t> widths(header_.size());
    auto widen = [&](const std::vector<std::string>& cells) {
        if (cells.size() > widths.size()) widths.resize(cells.size(), 0);
        for (std::size_t i = 0; i < cells.size(); ++i) widths[i] = std::max(widths[i], cells[i].size());
    };
    widen(header_);
    for (const auto& row : rows_) widen(row);

    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < widths.size(); ++i) {
            const std::string& cell = i < cells.size() ? cells[i] : "";
            if (i == 0) {
                out << cell << std::string(widths[i] - cell.size(), ' ');
            } else {
                out << "  " << std::string(widths[i] - cell.size(), ' ') << cell;
            }
        }
        out << '\n';
    };
    std::size_t total = widths.empty() ? 0 : widths.size() * 2 - 2;
    for (auto w : widths) total += w;
    if (!header_.empty()) {
        emit(header_);
        out << std::string(total, '-') << '\n';
    }
    for (const auto& row : rows_) {
        if (row.empty()) {
            out << std::string(total, '-') << '\n';
        } else {
            emit(row);
        }
    }
    return out.str();
}

std::string TextTable::format(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

std::string TextTable::format_p(double p) {
    if (p < 0.001) return "<0.001";
    return format(p, 3);
}

}  // namespace traitnet
