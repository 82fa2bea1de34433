#pragma once

#include "cec/baselines.hpp"
#include "cec/canny.hpp"
#include "cec/config.hpp"
#include "cec/error.hpp"
#include "cec/eval.hpp"
#include "cec/filter.hpp"
#include "cec/image.hpp"
#include "cec/io.hpp"
#include "cec/pca.hpp"
#include "cec/pipeline.hpp"
#include "cec/pnm.hpp"
#include "cec/quaternion.hpp"
#include "cec/seg.hpp"
