from nevdodge.cli import main

raise SystemExit(main())
