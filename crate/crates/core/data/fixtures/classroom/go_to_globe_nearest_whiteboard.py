def execute_command(image):
    image_patch = ImagePatch(image)
    whiteboard_patches = image_patch.find('whiteboard')
    globe_patches = image_patch.find('globe')
    if len(whiteboard_patches) == 0 or len(globe_patches) == 0:
        return {'function': 'None', 'error': 'Could not find both objects.'}
    whiteboard = whiteboard_patches[0]
    globe_patches.sort(key=lambda x: distance(x, whiteboard))
    globe = globe_patches[0]
    return {'function': 'navigate_to_object', 'inputs': (globe.horizontal_center, globe.vertical_center), 'box': [globe.left, globe.lower, globe.right, globe.upper]}
