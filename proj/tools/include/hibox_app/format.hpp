#pragma once

#include <string>
#include <vector>

namespace hibox::app {

// Shortest decimal that round-trips.
std::string fmt(double v);
std::string fmt(long long v);

std::string csv_line(const std::vector<std::string>& fields);

// 64-bit FNV-1a.
unsigned long long fnv1a(const std::string& bytes);
std::string hex64(unsigned long long v);

}  // namespace hibox::app
