from optstrat.cli import main

main()
