#pragma once

#include "persistlab/errors.hpp"
#include "persistlab/hull.hpp"
#include "persistlab/io.hpp"
#include "persistlab/model.hpp"
#include "persistlab/oracle.hpp"
#include "persistlab/persistence.hpp"
#include "persistlab/rkhs.hpp"
#include "persistlab/simulate.hpp"
#include "persistlab/spectral.hpp"
