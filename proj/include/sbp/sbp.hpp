#pragma once

#include "sbp/bregman.hpp"
#include "sbp/calib.hpp"
#include "sbp/complexity.hpp"
#include "sbp/encoding.hpp"
#include "sbp/error.hpp"
#include "sbp/fft.hpp"
#include "sbp/image.hpp"
#include "sbp/io.hpp"
#include "sbp/pcg.hpp"
#include "sbp/precond.hpp"
#include "sbp/sampling.hpp"
#include "sbp/transforms.hpp"
