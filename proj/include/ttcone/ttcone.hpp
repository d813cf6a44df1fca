#pragma once

#include "ttcone/dense_tensor.hpp"
#include "ttcone/errors.hpp"
#include "ttcone/linalg.hpp"
#include "ttcone/matrix_cone.hpp"
#include "ttcone/retraction.hpp"
#include "ttcone/rng.hpp"
#include "ttcone/tangent_cone.hpp"
#include "ttcone/tt_tensor.hpp"
#include "ttcone/verify.hpp"
