// Copyright 2026  The distse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DISTSE_TEXT_FORMAT_H_
#define DISTSE_TEXT_FORMAT_H_

#include <string>
#include <vector>

namespace distse {

// Fixed-point formatting, identical across runs and locales.
std::string FormatDouble(double value, int precision);

std::vector<std::string> Split(const std::string &s, char sep);
std::string Trim(const std::string &s);

// Minimal CSV: comma separated, no quoting (fields never contain commas).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int Column(const std::string &name) const;  // throws if absent
};

CsvTable ReadCsv(const std::string &path);
void WriteCsv(const std::string &path, const CsvTable &table);

std::string ReadTextFile(const std::string &path);
void WriteTextFile(const std::string &path, const std::string &text);

}  // namespace distse

#endif  // DISTSE_TEXT_FORMAT_H_
