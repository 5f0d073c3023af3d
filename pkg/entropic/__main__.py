from entropic.cli import main

raise SystemExit(main())
