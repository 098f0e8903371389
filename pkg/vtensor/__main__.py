from vtensor.cli import main

raise SystemExit(main())
