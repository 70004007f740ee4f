#pragma once

#include "ksom/dataset.hpp"
#include "ksom/error.hpp"
#include "ksom/evaluation.hpp"
#include "ksom/imputation.hpp"
#include "ksom/model.hpp"
#include "ksom/rng.hpp"
#include "ksom/som.hpp"
#include "ksom/superclass.hpp"
