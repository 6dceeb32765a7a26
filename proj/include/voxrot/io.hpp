#ifndef VOXROT_IO_HPP
#define VOXROT_IO_HPP

#include <string>
#include <variant>

#include "voxrot/tensor.hpp"

namespace voxrot {

// TSR binary tensor format. Fixed 12-byte header: magic "TSR1", one dtype
// byte (0 = f32, 1 = f64), one ndim byte, six zero pad bytes; then ndim
// little-endian u64 dims, then raw little-endian values row-major.
void tsr_write(const Tensor& t, const std::string& path);
void tsr_write(const DTensor& t, const std::string& path);

Tensor tsr_read_f32(const std::string& path);
DTensor tsr_read_f64(const std::string& path);

using AnyTensor = std::variant<Tensor, DTensor>;
AnyTensor tsr_read(const std::string& path);

// PPM (P6, 3 channels) / PGM (P5, 1 channel), maxval 255, header
// "P6\n<W> <H>\n255\n". Quantization: v -> round(clamp(v,0,1)*255),
// half away from zero; read maps byte b -> b/255.
void ppm_write(const Tensor& img, const std::string& path);
Tensor ppm_read(const std::string& path);

}  // namespace voxrot

#endif
