from benjaminbox.cli import main

raise SystemExit(main())
