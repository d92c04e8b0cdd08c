#pragma once

// '.' decimal, ',' separator, header row; independent of the global locale.

#include <fstream>
#include <locale>
#include <string>
#include <vector>

#include "fuchswave/error.hpp"

namespace fuchswave {

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error(ErrorKind::io, "cannot write " + path);
    out_.imbue(std::locale::classic());
    out_.precision(17);
    for (size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }
  void row(const std::vector<double>& v) {
    for (size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << v[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace fuchswave
