#pragma once

#include "algebra.hpp"
#include "codes.hpp"
#include "document.hpp"
#include "exterior.hpp"
#include "factor.hpp"
#include "graph.hpp"
#include "indicators.hpp"
#include "inference.hpp"
#include "models.hpp"
#include "transform.hpp"
