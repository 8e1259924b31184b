namespace mbx {}
