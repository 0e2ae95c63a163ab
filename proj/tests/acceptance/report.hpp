#pragma once

#include <cstdio>
#include <string>

namespace cropweed::acceptance {

// One line per criterion: PASS, FAIL or SKIP, the criterion number and a short detail.
class Report {
  public:
    void pass(int id, const std::string &what, const std::string &detail) { line("PASS", id, what, detail); }
    void fail(int id, const std::string &what, const std::string &detail) {
        ++failures_;
        line("FAIL", id, what, detail);
    }
    void skip(int id, const std::string &what, const std::string &detail) {
        ++skips_;
        line("SKIP", id, what, detail);
    }
    void check(int id, const std::string &what, bool ok, const std::string &detail) {
        ok ? pass(id, what, detail) : fail(id, what, detail);
    }

    [[nodiscard]] int failures() const noexcept { return failures_; }
    [[nodiscard]] int skips() const noexcept { return skips_; }

  private:
    static void line(const char *status, int id, const std::string &what, const std::string &detail) {
        std::printf("%s  criterion %d  %-34s %s\n", status, id, what.c_str(), detail.c_str());
        std::fflush(stdout);
    }

    int failures_ = 0;
    int skips_ = 0;
};

inline std::string fmt(const char *pattern, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

}  // namespace cropweed::acceptance
