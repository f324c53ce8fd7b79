#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace implab {

struct VerifyCheck {
    std::string name;
    double value = 0.0;     // measured quantity
    double threshold = 0.0; // bound it must respect
    bool less_is_pass = true;
    bool passed = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

// suite: fatou | phase | implosion | julia | all. quick keeps n <= 1e3 and
// trims sample counts so the whole thing stays well under a minute.
VerifyReport run_verify_suite(const std::string& suite, bool quick = false, int threads = 0);

void print_verify_report(const VerifyReport& rep, std::ostream& os);
void write_verify_csv(const VerifyReport& rep, std::ostream& os);

} // namespace implab
