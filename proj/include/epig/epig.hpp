// Copyright 2026 The epig Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "epig/batch.hpp"
#include "epig/binarize.hpp"
#include "epig/boxes.hpp"
#include "epig/deskew.hpp"
#include "epig/engine.hpp"
#include "epig/enhance.hpp"
#include "epig/error.hpp"
#include "epig/evalkit.hpp"
#include "epig/image.hpp"
#include "epig/image_io.hpp"
#include "epig/manifest.hpp"
#include "epig/pipeline.hpp"
#include "epig/raster.hpp"
#include "epig/segment.hpp"
#include "epig/training.hpp"
#include "epig/utf8.hpp"
