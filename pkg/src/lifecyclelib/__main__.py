#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

from lifecyclelib.cli import main

main()
