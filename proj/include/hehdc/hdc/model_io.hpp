#pragma once

#include <iosfwd>
#include <string>

#include "hehdc/hdc/quantize.hpp"

namespace hehdc::hdc {

// One "HDCM" container for both forms; bits = 0 marks a float model.
struct ModelFile {
    bool quantized = false;
    HdcModel model;
    QuantizedModel qmodel;
};

void write_model(std::ostream& os, const HdcModel& model);
void write_model(std::ostream& os, const QuantizedModel& qm);
ModelFile read_model(std::istream& is);

void save_model(const std::string& path, const HdcModel& model);
void save_model(const std::string& path, const QuantizedModel& qm);
ModelFile load_model(const std::string& path);

}  // namespace hehdc::hdc
