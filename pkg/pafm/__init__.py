# Flow matching workbench package
