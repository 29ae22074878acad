#include "pohozaev/csvio.hpp"

#include <cmath>
#include <sstream>

#include "pohozaev/jsonout.hpp"

namespace pohozaev {

std::string profile_to_csv(const RadialFunction& f) {
    std::string out = "r,u,du\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        out += format_number(f.grid->r[i]);
        out += ',';
        out += format_number(f.u[i]);
        out += ',';
        out += format_number(f.du[i]);
        out += '\n';
    }
    return out;
}

void write_profile_csv(const std::string& path, const RadialFunction& f) {
    write_text_file(path, profile_to_csv(f));
}

RadialFunction read_profile_csv(const std::string& path, int N) {
    std::string content;
    try {
        content = read_text_file(path);
    } catch (const std::exception& e) {
        throw InvalidArgumentError(e.what());
    }
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line) || line.rfind("r,u,du", 0) != 0) {
        throw InvalidArgumentError("profile CSV must start with header r,u,du");
    }
    std::vector<double> r, u, du;
    while (std::getline(in, line)) {
        if (line.empty()) continue;  // tolerate trailing newline
        std::istringstream row(line);
        std::string cell;
        double vals[3];
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(row, cell, ',')) {
                throw InvalidArgumentError("profile CSV row with missing cells");
            }
            try {
                vals[k] = std::stod(cell);
            } catch (const std::exception&) {
                throw InvalidArgumentError("profile CSV cell is not a number: " +
                                           cell);
            }
        }
        r.push_back(vals[0]);
        u.push_back(vals[1]);
        du.push_back(vals[2]);
    }
    if (r.size() < 65) {
        throw InvalidArgumentError("profile CSV has fewer than 65 rows");
    }
    const std::size_t n = r.size() - 1;
    const double R = r.back();
    const double h = R / static_cast<double>(n);
    for (std::size_t i = 0; i <= n; ++i) {
        if (std::abs(r[i] - h * static_cast<double>(i)) > 1e-9 * (R + 1.0)) {
            throw InvalidArgumentError("profile CSV grid is not uniform");
        }
    }
    auto g = make_grid(R, n, N);
    return make_function_with_derivative(std::move(g), std::move(u),
                                         std::move(du));
}

std::string table_to_csv(const std::vector<std::string>& header,
                         const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        out += header[i];
        out += (i + 1 < header.size()) ? "," : "\n";
    }
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += format_number(row[i]);
            out += (i + 1 < row.size()) ? "," : "\n";
        }
    }
    return out;
}

}  // namespace pohozaev
